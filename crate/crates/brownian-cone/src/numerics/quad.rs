use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

impl QuadControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParams(
                "quadrature tolerances must be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

// 15-point Kronrod nodes on [-1, 1] (positive half) with the embedded
// 7-point Gauss rule on the odd-indexed nodes. Constants are embedded
// rather than generated at runtime so results are bit-stable.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_67,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 15(7) panel; returns (kronrod, error_estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    res_asc *= half.abs();
    res_abs *= half.abs();

    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive Gauss-Kronrod integration of `f` over the finite interval `[a, b]`.
///
/// Bisects the panel with the largest error estimate until
/// `sum of panel errors <= max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, ctrl: &QuadControl) -> Result<QuadResult> {
    ctrl.validate()?;
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let (v, e) = gk15(&f, a, b);
    if !v.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total_value = v;
    let mut total_err = e;
    let mut splits = 0usize;

    while total_err > ctrl.abs_tol.max(ctrl.rel_tol * total_value.abs()) {
        if splits >= ctrl.max_subdivisions {
            return Err(Error::Quadrature(format!(
                "subdivision limit {} reached on [{a}, {b}] (error estimate {total_err:.3e})",
                ctrl.max_subdivisions
            )));
        }
        let worst = heap.pop().expect("heap cannot be empty while error > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Quadrature(format!(
                "non-finite integrand near [{}, {}]",
                worst.a, worst.b
            )));
        }
        total_value += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        splits += 1;
    }

    Ok(QuadResult {
        value: total_value,
        error_estimate: total_err,
    })
}

/// Integration of `f` over `[a, inf)`.
///
/// `tail_bound(r)` must bound `integral of |f| over [r, inf)`; blocks of
/// geometrically growing length are integrated until the analytic tail
/// bound is negligible against the requested tolerance.
pub fn integrate_to_inf<F, T>(f: F, a: f64, tail_bound: T, ctrl: &QuadControl) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    ctrl.validate()?;
    let mut lo = a;
    let mut len = 4.0_f64.max(a.abs() * 0.5);
    let mut value = 0.0;
    let mut err = 0.0;
    for _ in 0..64 {
        let hi = lo + len;
        let part = integrate(&f, lo, hi, ctrl)?;
        value += part.value;
        err += part.error_estimate;
        lo = hi;
        len *= 2.0;
        let tail = tail_bound(lo);
        if tail <= 0.5 * ctrl.abs_tol.max(ctrl.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error_estimate: err + tail,
            });
        }
    }
    Err(Error::Quadrature(
        "semi-infinite tail bound never fell below tolerance".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctrl() -> QuadControl {
        QuadControl::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x, 0.0, 1.0, &ctrl()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail_to_infinity() {
        let r = integrate_to_inf(|x| (-x).exp(), 0.0, |t| (-t).exp(), &ctrl()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn error_estimate_covers_true_error_on_smooth_battery() {
        // Ten smooth integrands with known values.
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64, f64)> = vec![
            (Box::new(|x: f64| x.exp()), 0.0, 1.0, std::f64::consts::E - 1.0),
            (Box::new(|x: f64| x.sin()), 0.0, std::f64::consts::PI, 2.0),
            (Box::new(|x: f64| 1.0 / (1.0 + x * x)), 0.0, 1.0, std::f64::consts::FRAC_PI_4),
            (Box::new(|x: f64| x.powi(5)), -1.0, 2.0, 63.0 / 6.0),
            (Box::new(|x: f64| (-x * x).exp()), -3.0, 3.0, 1.772_414_696_519_042_2),
            (Box::new(|x: f64| x.cos() * x), 0.0, 1.0, 1.0f64.cos() + 1.0f64.sin() - 1.0),
            (Box::new(|x: f64| (1.0 + x).ln()), 0.0, 1.0, 2.0 * 2.0f64.ln() - 1.0),
            (Box::new(|x: f64| x.sqrt()), 1.0, 4.0, 14.0 / 3.0),
            (Box::new(|x: f64| (2.0 * x).sinh()), 0.0, 1.0, (2.0f64.cosh() - 1.0) / 2.0),
            (Box::new(|x: f64| 1.0 / x), 1.0, std::f64::consts::E, 1.0),
        ];
        for (i, (f, a, b, exact)) in cases.iter().enumerate() {
            let r = integrate(f, *a, *b, &ctrl()).unwrap();
            let true_err = (r.value - exact).abs();
            assert!(
                r.error_estimate >= true_err || true_err < 1e-14,
                "case {i}: estimate {:.3e} < true {:.3e}",
                r.error_estimate,
                true_err
            );
            assert!(true_err < 1e-8, "case {i} inaccurate: {true_err:.3e}");
        }
    }

    #[test]
    fn erf_constant_check() {
        // integral of exp(-x^2) over [-3,3] = sqrt(pi) erf(3); fixed reference
        // value above is from the battery; sanity-check sqrt(pi) here.
        let r = integrate_to_inf(|x| (-x * x).exp(), 0.0, |t| (-t * t).exp(), &ctrl()).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn subdivision_limit_reported() {
        let tight = QuadControl {
            rel_tol: 1e-15,
            abs_tol: 1e-300,
            max_subdivisions: 3,
        };
        // Oscillatory enough that 3 splits cannot reach 1e-15.
        let err = integrate(|x| (50.0 * x).sin().abs(), 0.0, 10.0, &tight).unwrap_err();
        assert!(matches!(err, Error::Quadrature(_)));
    }
}
