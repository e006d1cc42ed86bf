/// A real number stored as `sign * exp(log_magnitude)`.
///
/// `sign == 0` if and only if the value is exactly zero; the magnitude is
/// then ignored (kept at `-inf` by convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogTerm {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl SignedLogTerm {
    pub const ZERO: SignedLogTerm = SignedLogTerm {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn new(log_magnitude: f64, sign: i8) -> Self {
        debug_assert!(sign == -1 || sign == 0 || sign == 1);
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                log_magnitude,
                sign,
            }
        }
    }

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// `ln(coeff) + exponent` with the sign of `coeff`; `coeff = 0` gives ZERO.
    ///
    /// Convenient for series terms of the form `coeff * exp(exponent)`.
    pub fn from_parts(coeff: f64, exponent: f64) -> Self {
        if coeff == 0.0 {
            Self::ZERO
        } else {
            Self {
                log_magnitude: coeff.abs().ln() + exponent,
                sign: if coeff > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn magnitude(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.log_magnitude.exp()
        }
    }
}

/// Running signed log-sum-exp accumulator.
///
/// The partial sum is `acc * exp(shift)`; `shift` tracks the largest
/// magnitude seen so far so that `acc` stays O(number of terms). Addition
/// of finite terms never produces NaN, and adding `+x` then `-x` at the
/// same shift cancels exactly.
#[derive(Debug, Clone)]
pub struct SignedLogSum {
    shift: f64,
    acc: f64,
}

impl Default for SignedLogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl SignedLogSum {
    pub fn new() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            acc: 0.0,
        }
    }

    pub fn add(&mut self, term: SignedLogTerm) {
        if term.sign == 0 {
            return;
        }
        let s = f64::from(term.sign);
        if self.acc == 0.0 {
            self.shift = term.log_magnitude;
            self.acc = s;
        } else if term.log_magnitude > self.shift {
            self.acc = self.acc * (self.shift - term.log_magnitude).exp() + s;
            self.shift = term.log_magnitude;
        } else {
            self.acc += s * (term.log_magnitude - self.shift).exp();
        }
    }

    pub fn value(&self) -> f64 {
        if self.acc == 0.0 {
            0.0
        } else {
            self.acc * self.shift.exp()
        }
    }

    /// Total as a signed log term; cancellation to zero yields `sign == 0`.
    pub fn signed_log(&self) -> SignedLogTerm {
        if self.acc == 0.0 {
            SignedLogTerm::ZERO
        } else {
            SignedLogTerm {
                log_magnitude: self.shift + self.acc.abs().ln(),
                sign: if self.acc > 0.0 { 1 } else { -1 },
            }
        }
    }
}

/// `ln(1 - exp(-delta))` for `delta > 0`, accurate over the whole range.
pub fn ln_one_minus_exp_neg(delta: f64) -> f64 {
    debug_assert!(delta >= 0.0);
    if delta == 0.0 {
        f64::NEG_INFINITY
    } else if delta > std::f64::consts::LN_2 {
        (-(-delta).exp()).ln_1p()
    } else {
        (-(-delta).exp_m1()).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_round_trip() {
        // exp(ln(x)) is accurate to ~|ln x| ulps, so allow 1e-12 relative.
        for &v in &[3.5, -2.25e-200, 1e300] {
            let t = SignedLogTerm::from_value(v);
            assert!((t.value() - v).abs() <= 1e-12 * v.abs());
        }
        assert_eq!(SignedLogTerm::from_value(0.0).sign, 0);
        assert_eq!(SignedLogTerm::from_value(0.0).value(), 0.0);
    }

    #[test]
    fn huge_magnitudes_do_not_overflow_the_accumulator() {
        let mut s = SignedLogSum::new();
        s.add(SignedLogTerm::new(1000.0, 1));
        s.add(SignedLogTerm::new(999.0, -1));
        // exp(1000) - exp(999) = exp(999) * (e - 1)
        let log = s.signed_log();
        assert_eq!(log.sign, 1);
        assert!((log.log_magnitude - (999.0 + (std::f64::consts::E - 1.0).ln())).abs() < 1e-12);
    }

    #[test]
    fn exact_cancellation_gives_sign_zero() {
        let mut s = SignedLogSum::new();
        s.add(SignedLogTerm::new(-3.0, 1));
        s.add(SignedLogTerm::new(-3.0, -1));
        assert_eq!(s.signed_log().sign, 0);
        assert_eq!(s.value(), 0.0);
    }

    #[test]
    fn no_nan_for_finite_inputs() {
        let mut s = SignedLogSum::new();
        for (lm, sg) in [(-745.0, 1), (700.0, -1), (700.0, 1), (0.0, 1), (-745.0, -1)] {
            s.add(SignedLogTerm::new(lm, sg));
            assert!(!s.value().is_nan());
        }
    }

    #[test]
    fn ln_one_minus_exp_neg_matches_naive() {
        for &d in &[1e-3f64, 0.5, 0.694, 1.0, 40.0] {
            let naive = (1.0 - (-d).exp()).ln();
            let acc = ln_one_minus_exp_neg(d);
            assert!((acc - naive).abs() <= 1e-10 * naive.abs().max(1.0), "d={d}");
        }
        // Below roughly 1e-8 the naive form loses digits; check against the
        // small-delta expansion ln(delta) - delta/2 instead.
        let d = 1e-12;
        assert!((ln_one_minus_exp_neg(d) - d.ln()).abs() < 1e-9);
    }
}
