//! Shared numeric substrate: signed log-space series summation, adaptive
//! Gauss-Kronrod quadrature, finite-difference differential operators and
//! histogram/statistics helpers.

mod fd;
mod quad;
mod series;
mod signed_log;
mod stats;

pub use fd::{apply_dual_forward, apply_generator, FdStencil};
pub use quad::{integrate, integrate_to_inf, QuadControl, QuadResult};
pub use series::{sum_bilateral, sum_unilateral, SeriesControl, SeriesSum};
pub use signed_log::{ln_one_minus_exp_neg, SignedLogSum, SignedLogTerm};
pub use stats::{Estimate, Histogram, HistogramSpec, RunningStats};
