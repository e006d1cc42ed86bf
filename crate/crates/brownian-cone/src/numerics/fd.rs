/// Central second-order finite-difference stencil.
#[derive(Debug, Clone, Copy)]
pub struct FdStencil {
    pub step: f64,
}

impl FdStencil {
    pub fn new(step: f64) -> Self {
        assert!(step > 0.0, "stencil step must be positive");
        Self { step }
    }
}

/// Finite-difference generator `G h = 1/2 (d_x - d_y)^2 h + (1-gamma) d_x h + gamma d_y h`.
///
/// The degenerate second-order part is a single second difference along the
/// diagonal direction (1, -1), which keeps the stencil to seven evaluations.
/// O(step^2) accurate for C^4 functions; the evaluation point must be at
/// distance > step from the domain boundary.
pub fn apply_generator<F>(h: F, gamma: f64, x: f64, y: f64, stencil: FdStencil) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let s = stencil.step;
    let diag = (h(x + s, y - s) - 2.0 * h(x, y) + h(x - s, y + s)) / (s * s);
    let dx = (h(x + s, y) - h(x - s, y)) / (2.0 * s);
    let dy = (h(x, y + s) - h(x, y - s)) / (2.0 * s);
    0.5 * diag + (1.0 - gamma) * dx + gamma * dy
}

/// Residual of the forward equation `d_t q = 1/2 d_yy q - gamma d_y q`
/// satisfied by the killed transition kernel in cone coordinates.
///
/// Returns `d_t q - 1/2 d_yy q + gamma d_y q`; zero up to O(step^2) away
/// from the source and the boundary.
pub fn apply_dual_forward<F>(q: F, gamma: f64, t: f64, y: f64, stencil: FdStencil) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let s = stencil.step;
    let dt = (q(t + s, y) - q(t - s, y)) / (2.0 * s);
    let dyy = (q(t, y + s) - 2.0 * q(t, y) + q(t, y - s)) / (s * s);
    let dy = (q(t, y + s) - q(t, y - s)) / (2.0 * s);
    dt - 0.5 * dyy + gamma * dy
}
