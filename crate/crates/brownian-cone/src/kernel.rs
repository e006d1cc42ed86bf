//! Kernel polynomial of the killed degenerate Brownian motion, its algebraic
//! branches, the saddle-point parametrization of the parabola arc, and the
//! compensation point sequence.
//!
//! All harmonic functions of the killed process are built from exponentials
//! `exp(px + qy)` whose parameters lie on the zero set of the kernel
//! `K(p, q) = (p-q)^2/2 + (1-gamma) p + gamma q`, a parabola. Everything in
//! this module is a pure function of its arguments.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Model parameters: drift `gamma` of the height process per unit time,
/// apex abscissa `t0` of the cone, starting height `y0`.
///
/// The start must lie strictly inside the cone, i.e. `0 < y0 < t0`; the
/// quadrant starting point is then `(x0, y0)` with `x0 = t0 - y0 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub t0: f64,
    pub y0: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, t0: f64, y0: f64) -> Result<Self> {
        let p = Self { gamma, t0, y0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if !(self.t0 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "t0 must be > 0, got {}",
                self.t0
            )));
        }
        if !(self.y0 > 0.0 && self.y0 < self.t0) {
            return Err(Error::InvalidParams(format!(
                "start must satisfy 0 < y0 < t0, got y0 = {}, t0 = {}",
                self.y0, self.t0
            )));
        }
        Ok(())
    }

    /// Horizontal quadrant coordinate of the start, `x0 = t0 - y0`.
    pub fn x0(&self) -> f64 {
        self.t0 - self.y0
    }

    /// Quadrant starting point `z0 = (x0, y0)`.
    pub fn start(&self) -> (f64, f64) {
        (self.x0(), self.y0)
    }
}

/// A point `(p, q)` on (or near) the kernel parabola.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ParabolaPoint {
    pub p: f64,
    pub q: f64,
}

impl ParabolaPoint {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    /// Lazy validation of the on-parabola invariant for externally
    /// constructed points: `|K(p, q)| <= 1e-12 * max(1, p^2, q^2)`.
    pub fn check_on_parabola(&self, gamma: f64) -> Result<()> {
        let k = kernel(self.p, self.q, gamma);
        let scale = 1.0_f64.max(self.p * self.p).max(self.q * self.q);
        if k.abs() <= 1e-12 * scale {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point ({}, {}) is off the kernel parabola: K = {k:.3e}",
                self.p, self.q
            )))
        }
    }
}

/// A direction `alpha` in `[0, pi/2]` parametrizing the parabola arc.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Direction {
    alpha: f64,
}

impl Direction {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha >= 0.0 && alpha <= FRAC_PI_2 {
            Ok(Self { alpha })
        } else {
            Err(Error::Domain(format!(
                "direction must lie in [0, pi/2], got {alpha}"
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// The kernel `K(p, q) = (p-q)^2 / 2 + (1-gamma) p + gamma q`.
pub fn kernel(p: f64, q: f64, gamma: f64) -> f64 {
    let d = p - q;
    0.5 * d * d + (1.0 - gamma) * p + gamma * q
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSign {
    Plus,
    Minus,
}

/// `P^{+-}(q) = gamma - 1 + q +- sqrt((1-gamma)^2 - 2q)`, the two roots in
/// `p` of `K(p, q) = 0`. Real for `q <= (1-gamma)^2 / 2`.
pub fn branch_p(q: f64, gamma: f64, sign: BranchSign) -> Result<f64> {
    let disc = (1.0 - gamma) * (1.0 - gamma) - 2.0 * q;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "branch P undefined: (1-gamma)^2 - 2q = {disc:.3e} < 0"
        )));
    }
    let root = disc.sqrt();
    Ok(match sign {
        BranchSign::Plus => gamma - 1.0 + q + root,
        BranchSign::Minus => gamma - 1.0 + q - root,
    })
}

/// `Q^{+-}(p) = -gamma + p +- sqrt(gamma^2 - 2p)`, the two roots in `q` of
/// `K(p, q) = 0`. Real for `p <= gamma^2 / 2`.
pub fn branch_q(p: f64, gamma: f64, sign: BranchSign) -> Result<f64> {
    let disc = gamma * gamma - 2.0 * p;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "branch Q undefined: gamma^2 - 2p = {disc:.3e} < 0"
        )));
    }
    let root = disc.sqrt();
    Ok(match sign {
        BranchSign::Plus => -gamma + p + root,
        BranchSign::Minus => -gamma + p - root,
    })
}

/// The saddle point `(p(alpha), q(alpha))`: the unique point of the parabola
/// maximizing the linear form `p cos(alpha) + q sin(alpha)`.
///
/// Written with `sin` and `cos` so the endpoint values are the exact limits
/// `(gamma^2/2, gamma^2/2 - gamma)` at `alpha = 0` and
/// `(gamma^2/2 - 1/2, (1-gamma)^2/2)` at `alpha = pi/2`; the endpoints are
/// additionally hard-coded to avoid any trigonometric residue.
pub fn saddle_point(alpha: Direction, gamma: f64) -> ParabolaPoint {
    let a = alpha.alpha();
    if a == 0.0 {
        return ParabolaPoint::new(0.5 * gamma * gamma, 0.5 * gamma * gamma - gamma);
    }
    if a == FRAC_PI_2 {
        let og = 1.0 - gamma;
        return ParabolaPoint::new(0.5 * gamma * gamma - 0.5, 0.5 * og * og);
    }
    let (s, c) = a.sin_cos();
    let denom = 2.0 * (s + c) * (s + c);
    ParabolaPoint::new(
        0.5 * gamma * gamma - s * s / denom,
        0.5 * (1.0 - gamma) * (1.0 - gamma) - c * c / denom,
    )
}

/// The drift direction `alpha_gamma = arctan(gamma / (1-gamma))`, the unique
/// direction whose saddle point is the origin.
pub fn drift_direction(gamma: f64) -> Direction {
    Direction {
        alpha: (gamma / (1.0 - gamma)).atan(),
    }
}

/// n-th point of the compensation sequence started at `origin`.
///
/// Even indices `2m` follow the closed form in `m` (no recursion, so no
/// error accumulation); odd points borrow their coordinates from the two
/// adjacent even points: `(p_{2m+1}, q_{2m+1}) = (p_{2m}, q_{2m+2})`.
pub fn comp_point(origin: ParabolaPoint, gamma: f64, n: i64) -> ParabolaPoint {
    if n.rem_euclid(2) == 0 {
        comp_even(origin, gamma, n / 2)
    } else {
        let m = n.div_euclid(2);
        ParabolaPoint::new(
            comp_even(origin, gamma, m).p,
            comp_even(origin, gamma, m + 1).q,
        )
    }
}

fn comp_even(origin: ParabolaPoint, gamma: f64, m: i64) -> ParabolaPoint {
    let m = m as f64;
    let shift = 2.0 * m * (origin.p - origin.q);
    ParabolaPoint::new(
        origin.p + shift - 2.0 * m * (m + gamma),
        origin.q + shift - 2.0 * m * (m + gamma - 1.0),
    )
}

/// The doubly infinite compensation sequence as an indexable object.
#[derive(Debug, Clone, Copy)]
pub struct CompensationSequence {
    pub origin: ParabolaPoint,
    pub gamma: f64,
}

impl CompensationSequence {
    pub fn new(origin: ParabolaPoint, gamma: f64) -> Result<Self> {
        origin.check_on_parabola(gamma)?;
        Ok(Self { origin, gamma })
    }

    pub fn point(&self, n: i64) -> ParabolaPoint {
        comp_point(self.origin, self.gamma, n)
    }
}
