//! Closed-form quantities for a drifted Brownian motion `y0 + W(t) + gamma t`
//! killed when it leaves the cone `0 <= y <= t0 + t`, together with an
//! independent Monte Carlo boundary-crossing simulator that validates them.
//!
//! After the linear change of variables `(t', y) -> (t' - y, y)` the
//! space-time process becomes a degenerate Brownian motion in the quadrant;
//! everything evaluated here (harmonic functions, persistence and edge-exit
//! probabilities, exit densities, the exit-time law, the killed transition
//! kernel and its large-distance asymptotics) is built from exponentials
//! parametrized by a single parabola in the `(p, q)` plane.
//!
//! Modules:
//! - [`kernel`]: the parabola, its branches, the saddle-point arc and the
//!   compensation point sequence.
//! - [`harmonics`]: compensation series for harmonic functions, persistence
//!   and exit probabilities, the boundary Laplace transform.
//! - [`densities`]: exit densities, exit-time density, survival, the killed
//!   transition kernel, Green's function and its asymptotics.
//! - [`montecarlo`]: grid simulation with exact Brownian-bridge crossing
//!   corrections for both linear boundaries.
//! - [`numerics`]: signed log-space series summation, adaptive quadrature,
//!   finite differences, histograms.
//! - [`validate`]: the cross-check battery behind `brownian-cone validate`.
//! - [`cli`]: machine-readable command execution and the run manifest.

pub mod cli;
pub mod densities;
pub mod error;
pub mod harmonics;
pub mod kernel;
pub mod montecarlo;
pub mod numerics;
pub mod validate;

pub use error::{Error, Result};
pub use kernel::ModelParams;
