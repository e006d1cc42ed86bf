use crate::error::{Error, Result};

use super::signed_log::{SignedLogSum, SignedLogTerm};

/// Truncation control for the bilateral compensation series.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesControl {
    /// Stop once the next term magnitude on each side falls below this.
    pub abs_tol: f64,
    /// Maximum number of terms per side before giving up.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            max_terms: 200,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "series abs_tol must be > 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_terms < 4 {
            return Err(Error::InvalidParams(format!(
                "series max_terms must be >= 4, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}

/// Result of a truncated series summation.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSum {
    pub value: f64,
    pub terms_used: usize,
    /// Sum of the first omitted term magnitudes; bounds the remainder for
    /// terms of eventually decreasing magnitude.
    pub bound: f64,
    pub signed_log: SignedLogTerm,
    /// Log magnitude of the largest term encountered; sets the rounding
    /// floor of the total.
    pub max_log_magnitude: f64,
}

impl SeriesSum {
    /// Attainable absolute accuracy of the total: rounding noise scales
    /// with the number of terms and the largest term magnitude.
    pub fn rounding_floor(&self) -> f64 {
        8.0 * (self.terms_used + 2) as f64 * f64::EPSILON * self.max_log_magnitude.exp()
    }
}

/// Sums `term(0), term(1), term(-1), term(2), term(-2), ...` until the next
/// unevaluated magnitude on both sides is below `ctrl.abs_tol`.
///
/// The summation order is fixed so results are reproducible across runs.
/// Requires term magnitudes to be eventually strictly decreasing in `|n|`
/// on each side.
pub fn sum_bilateral<F>(term: F, ctrl: &SeriesControl) -> Result<SeriesSum>
where
    F: Fn(i64) -> SignedLogTerm,
{
    ctrl.validate()?;
    let log_tol = ctrl.abs_tol.ln();
    let mut acc = SignedLogSum::new();
    let first = term(0);
    let mut max_log = if first.sign == 0 {
        f64::NEG_INFINITY
    } else {
        first.log_magnitude
    };
    acc.add(first);
    let mut used = 1usize;
    let mut k: i64 = 1;
    loop {
        let plus = term(k);
        let minus = term(-k);
        let plus_small = plus.sign == 0 || plus.log_magnitude < log_tol;
        let minus_small = minus.sign == 0 || minus.log_magnitude < log_tol;
        if plus_small && minus_small {
            return Ok(SeriesSum {
                value: acc.value(),
                terms_used: used,
                bound: plus.magnitude() + minus.magnitude(),
                signed_log: acc.signed_log(),
                max_log_magnitude: max_log,
            });
        }
        if k as usize > ctrl.max_terms {
            return Err(Error::NonConvergence {
                max_terms: ctrl.max_terms,
                bound: plus.magnitude() + minus.magnitude(),
            });
        }
        for t in [plus, minus] {
            if t.sign != 0 {
                max_log = max_log.max(t.log_magnitude);
            }
            acc.add(t);
        }
        used += 2;
        k += 1;
    }
}

/// One-sided variant summing `term(1), term(2), ...` with the same
/// frontier stopping rule.
pub fn sum_unilateral<F>(term: F, ctrl: &SeriesControl) -> Result<SeriesSum>
where
    F: Fn(u64) -> SignedLogTerm,
{
    ctrl.validate()?;
    let log_tol = ctrl.abs_tol.ln();
    let mut acc = SignedLogSum::new();
    let mut used = 0usize;
    let mut max_log = f64::NEG_INFINITY;
    let mut k: u64 = 1;
    loop {
        let next = term(k);
        if next.sign == 0 || next.log_magnitude < log_tol {
            return Ok(SeriesSum {
                value: acc.value(),
                terms_used: used,
                bound: next.magnitude(),
                signed_log: acc.signed_log(),
                max_log_magnitude: max_log,
            });
        }
        if k as usize > ctrl.max_terms {
            return Err(Error::NonConvergence {
                max_terms: ctrl.max_terms,
                bound: next.magnitude(),
            });
        }
        max_log = max_log.max(next.log_magnitude);
        acc.add(next);
        used += 1;
        k += 1;
    }
}
