//! Cross-check battery: algebraic identities, quadrature mass identities,
//! harmonicity residuals, asymptotic-ratio tests and the Monte Carlo
//! comparison, each reported as a named check with its measured value and
//! tolerance.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};

use crate::densities::{
    boundary_asymptotic_constants, boundary_density_ratio_f1, conditioned_functional_horizon_tail,
    exit_density_f1, exit_density_f2, exit_time_density, green_ratio, kernel_via_convolution,
    survival_probability, survival_tail_asymptotic, survival_tail_literal, transition_kernel,
};
use crate::error::Result;
use crate::harmonics::{
    exit_prob_edge, exit_prob_sinh_literal, exit_series, h_edge, h_interior,
    persistence_forms, persistence_probability, Edge, EdgeDirection,
};
use crate::kernel::{drift_direction, saddle_point, Direction, ModelParams};
use crate::montecarlo::{
    conditioned_functional_from_records, estimate_transition_density,
    exit_probabilities_from_records, histograms_from_records, simulate_all, McConfig,
};
use crate::numerics::{
    apply_dual_forward, apply_generator, integrate, integrate_to_inf, FdStencil, Histogram,
    HistogramSpec, QuadControl, SeriesControl,
};

/// One named check of the report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion this check belongs to, 1-10.
    pub criterion: u8,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn within(name: &str, criterion: u8, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            criterion,
            measured,
            tolerance,
            pass: measured.abs() <= tolerance,
            detail: None,
        }
    }

    fn at_least(name: &str, criterion: u8, measured: f64, minimum: f64) -> Self {
        Self {
            name: name.into(),
            criterion,
            measured,
            tolerance: minimum,
            pass: measured >= minimum,
            detail: None,
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

/// Validation depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Algebraic and quadrature checks only; seconds.
    Fast,
    /// Adds the Monte Carlo cross-validation; minutes.
    Full,
}

/// The reference parameter set used for pinned scalar values.
pub fn reference_params() -> ModelParams {
    ModelParams::new(0.5, 2.0, 1.0).unwrap()
}

/// Secondary parameter sets exercised by the identity checks.
pub fn secondary_params() -> [ModelParams; 2] {
    [
        ModelParams::new(0.25, 3.0, 1.0).unwrap(),
        ModelParams::new(0.75, 1.5, 0.5).unwrap(),
    ]
}

fn is_reference(params: &ModelParams) -> bool {
    let r = reference_params();
    (params.gamma - r.gamma).abs() < 1e-12
        && (params.t0 - r.t0).abs() < 1e-12
        && (params.y0 - r.y0).abs() < 1e-12
}

/// Criterion 1: the interior series plus the two one-sided exit series
/// reproduce the bare exponential term by term.
pub fn check_partition_identity(params: &ModelParams, ctrl: &SeriesControl) -> Result<Check> {
    let (x0, y0) = params.start();
    let mut worst = 0.0f64;
    for i in 0..=19 {
        let alpha = Direction::new(FRAC_PI_2 * i as f64 / 19.0)?;
        let origin = saddle_point(alpha, params.gamma);
        let h = h_interior((x0, y0), origin, params.gamma, ctrl)?.value;
        let l1 = exit_series(params, origin, Edge::One, ctrl)?.value;
        let l2 = exit_series(params, origin, Edge::Two, ctrl)?.value;
        let rhs = (origin.p * x0 + origin.q * y0).exp();
        worst = worst.max((h + l1 + l2 - rhs).abs());
    }
    Ok(Check::within("partition_identity", 1, worst, 1e-12))
}

/// Criterion 2: the alternating sum and the two sinh repackagings of the
/// persistence probability agree pairwise.
pub fn check_persistence_forms(params: &ModelParams, ctrl: &SeriesControl) -> Result<Vec<Check>> {
    let f = persistence_forms(params, ctrl)?;
    let spread = (f.alternating - f.sinh_first)
        .abs()
        .max((f.alternating - f.sinh_second).abs())
        .max((f.sinh_first - f.sinh_second).abs());
    let mut checks = vec![Check::within("persistence_triple_form_spread", 2, spread, 1e-12)
        .with_detail(format!(
            "alternating {:.17e}, sinh-1 {:.17e}, sinh-2 {:.17e}",
            f.alternating, f.sinh_first, f.sinh_second
        ))];
    if is_reference(params) {
        checks.push(Check::within(
            "persistence_reference_value",
            2,
            f.alternating - 0.300626,
            1e-6,
        ));
    }
    Ok(checks)
}

/// Criterion 3: persistence + both edge-exit probabilities = 1.
pub fn check_probability_partition(params: &ModelParams, ctrl: &SeriesControl) -> Result<Check> {
    let alpha = drift_direction(params.gamma);
    let p = persistence_probability(params, ctrl)?;
    let e1 = exit_prob_edge(params, alpha, Edge::One, ctrl)?;
    let e2 = exit_prob_edge(params, alpha, Edge::Two, ctrl)?;
    Ok(Check::within(
        "probability_partition",
        3,
        p + e1 + e2 - 1.0,
        1e-10,
    ))
}

fn f1_tail_bound(params: &ModelParams, hpi2: f64, y: f64) -> f64 {
    let g = params.gamma;
    let split = params.t0 + 10f64.max(20.0 / (g * g).min((1.0 - g) * (1.0 - g)));
    if y < split {
        return f64::INFINITY;
    }
    let rate = 0.5 * (1.0 - g) * (1.0 - g);
    2.0 * hpi2 * (-rate * y).exp() / rate * y.powf(-1.5) / (2.0 * PI).sqrt()
}

fn f2_tail_bound(params: &ModelParams, h0: f64, x: f64) -> f64 {
    let g = params.gamma;
    let split = params.t0 + 10f64.max(20.0 / (g * g).min((1.0 - g) * (1.0 - g)));
    if x < split {
        return f64::INFINITY;
    }
    let rate = 0.5 * g * g;
    2.0 * h0 * (-rate * x).exp() / rate * x.powf(-1.5) / (2.0 * PI).sqrt()
}

/// Criterion 4: quadrature masses of f1, f2, f_T and the kernel slice match
/// the series probabilities.
pub fn check_mass_identities(
    params: &ModelParams,
    ctrl: &SeriesControl,
    qctrl: &QuadControl,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let alpha = drift_direction(params.gamma);
    let (h0, hpi2) = boundary_asymptotic_constants(params, ctrl)?;

    let m1 = integrate_to_inf(
        |y| exit_density_f1(params, y.max(params.t0 * (1.0 + 1e-15)), ctrl).unwrap_or(0.0),
        params.t0,
        |y| f1_tail_bound(params, hpi2, y),
        qctrl,
    )?;
    let p1 = exit_prob_edge(params, alpha, Edge::One, ctrl)?;
    checks.push(Check::within("mass_f1_vs_exit_prob_edge1", 4, m1.value - p1, 1e-6));

    let m2 = integrate_to_inf(
        |x| exit_density_f2(params, x.max(params.t0 * (1.0 + 1e-15)), ctrl).unwrap_or(0.0),
        params.t0,
        |x| f2_tail_bound(params, h0, x),
        qctrl,
    )?;
    let p2 = exit_prob_edge(params, alpha, Edge::Two, ctrl)?;
    checks.push(Check::within("mass_f2_vs_exit_prob_edge2", 4, m2.value - p2, 1e-6));

    let mt = integrate_to_inf(
        |t| exit_time_density(params, t.max(1e-300), ctrl).unwrap_or(0.0),
        0.0,
        |t| f1_tail_bound(params, hpi2, params.t0 + t) + f2_tail_bound(params, h0, params.t0 + t),
        qctrl,
    )?;
    let escape = 1.0 - persistence_probability(params, ctrl)?;
    checks.push(Check::within("mass_ft_vs_escape_prob", 4, mt.value - escape, 1e-6));

    for t in [0.25, 1.0, 4.0] {
        let mass = integrate(
            |y| transition_kernel(params, t, y.clamp(0.0, params.t0 + t), ctrl).unwrap_or(0.0),
            0.0,
            params.t0 + t,
            qctrl,
        )?;
        let s = survival_probability(params, t, ctrl, qctrl)?;
        checks.push(Check::within(
            &format!("kernel_mass_vs_survival_t{t}"),
            4,
            mass.value - s,
            1e-6,
        ));
    }
    Ok(checks)
}

/// Relative generator residual and the observed convergence order over the
/// step decade [1e-2, 1e-3].
fn residual_and_order<F>(h: F, gamma: f64, z: (f64, f64), forward: bool) -> (f64, f64)
where
    F: Fn(f64, f64) -> f64,
{
    let value = h(z.0, z.1);
    let resid = |step: f64| {
        if forward {
            apply_dual_forward(&h, gamma, z.0, z.1, FdStencil::new(step)).abs() / value
        } else {
            apply_generator(&h, gamma, z.0, z.1, FdStencil::new(step)).abs() / value
        }
    };
    let coarse = resid(1e-2);
    let fine = resid(1e-3);
    (fine, (coarse / fine).log10())
}

/// Criterion 5: finite-difference harmonicity of the interior and edge
/// harmonic functions and the forward equation for the kernel.
pub fn check_harmonicity(params: &ModelParams, ctrl: &SeriesControl) -> Result<Vec<Check>> {
    let gamma = params.gamma;
    let z = (1.5, 1.5);
    let mut worst_resid = 0.0f64;
    let mut worst_order = f64::INFINITY;
    for alpha in [FRAC_PI_8, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, 3.0 * FRAC_PI_8] {
        let origin = saddle_point(Direction::new(alpha)?, gamma);
        let c = *ctrl;
        let h = move |x: f64, y: f64| h_interior((x, y), origin, gamma, &c).unwrap().value;
        let (r, o) = residual_and_order(h, gamma, z, false);
        worst_resid = worst_resid.max(r);
        worst_order = worst_order.min(o);
    }
    for which in [EdgeDirection::Alpha0, EdgeDirection::AlphaPi2] {
        let c = *ctrl;
        let h = move |x: f64, y: f64| h_edge((x, y), which, gamma, &c).unwrap().value;
        let (r, o) = residual_and_order(h, gamma, z, false);
        worst_resid = worst_resid.max(r);
        worst_order = worst_order.min(o);
    }
    let c = *ctrl;
    let p = *params;
    let kern = move |t: f64, y: f64| transition_kernel(&p, t, y, &c).unwrap();
    let (kr, ko) = residual_and_order(kern, gamma, (1.0, 1.5), true);

    Ok(vec![
        Check::within("harmonicity_residual_step_1e-3", 5, worst_resid, 1e-5),
        Check::at_least("harmonicity_order", 5, worst_order, 1.9),
        Check::within("kernel_forward_residual_step_1e-3", 5, kr, 1e-5),
        Check::at_least("kernel_forward_order", 5, ko, 1.9),
    ])
}

/// Criterion 6: harmonic functions vanish on the axes; the kernel vanishes
/// exactly (term by term) on the fixed edge.
pub fn check_boundary_vanishing(params: &ModelParams, ctrl: &SeriesControl) -> Result<Vec<Check>> {
    let gamma = params.gamma;
    let mut worst_h = 0.0f64;
    for alpha in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let origin = saddle_point(Direction::new(alpha)?, gamma);
        for z in [(0.0, 0.8), (0.0, 3.0), (1.2, 0.0), (4.0, 0.0)] {
            worst_h = worst_h.max(h_interior(z, origin, gamma, ctrl)?.value.abs());
        }
    }
    for which in [EdgeDirection::Alpha0, EdgeDirection::AlphaPi2] {
        for z in [(0.0, 0.8), (0.0, 3.0), (1.2, 0.0), (4.0, 0.0)] {
            worst_h = worst_h.max(h_edge(z, which, gamma, ctrl)?.value.abs());
        }
    }
    let mut worst_kernel_top = 0.0f64;
    let mut worst_kernel_bottom = 0.0f64;
    for t in [0.25, 1.0, 4.0] {
        worst_kernel_bottom = worst_kernel_bottom.max(transition_kernel(params, t, 0.0, ctrl)?.abs());
        worst_kernel_top =
            worst_kernel_top.max(transition_kernel(params, t, params.t0 + t, ctrl)?.abs());
    }
    Ok(vec![
        Check::within("boundary_vanishing_harmonics", 6, worst_h, 1e-12),
        Check::within("boundary_vanishing_kernel_top_edge", 6, worst_kernel_top, 1e-12),
        Check::within("kernel_exact_zero_fixed_edge", 6, worst_kernel_bottom, 0.0),
    ])
}

/// Criterion 7: Chapman-Kolmogorov composition of the kernel.
pub fn check_chapman_kolmogorov(
    params: &ModelParams,
    ctrl: &SeriesControl,
    qctrl: &QuadControl,
) -> Result<Check> {
    let (s, t) = (0.5, 0.5);
    let mut worst = 0.0f64;
    let top = params.t0 + s + t;
    for i in 1..=5 {
        let y = top * i as f64 / 6.0;
        let lhs = transition_kernel(params, s + t, y, ctrl)?;
        let rhs = integrate(
            |u| {
                let uu = u.clamp(0.0, params.t0 + s);
                let first = transition_kernel(params, s, uu, ctrl).unwrap_or(0.0);
                if first == 0.0 || uu <= 0.0 || uu >= params.t0 + s {
                    return 0.0;
                }
                let from_u = ModelParams {
                    gamma: params.gamma,
                    t0: params.t0 + s,
                    y0: uu,
                };
                first * transition_kernel(&from_u, t, y, ctrl).unwrap_or(0.0)
            },
            0.0,
            params.t0 + s,
            qctrl,
        )?;
        worst = worst.max((lhs - rhs.value).abs());
    }
    Ok(Check::within("chapman_kolmogorov", 7, worst, 1e-6))
}

/// Extra consistency checks: stopped-path convolution route to the kernel,
/// and the edge-exchange reflection symmetry.
pub fn check_kernel_consistency(
    params: &ModelParams,
    ctrl: &SeriesControl,
    qctrl: &QuadControl,
) -> Result<Vec<Check>> {
    let mut worst_conv = 0.0f64;
    for (t, y) in [(0.5, 1.2), (1.0, 0.6)] {
        let series = transition_kernel(params, t, y, ctrl)?;
        let conv = kernel_via_convolution(params, t, y, ctrl, qctrl)?;
        worst_conv = worst_conv.max((series - conv).abs());
    }
    let mirrored = ModelParams {
        gamma: 1.0 - params.gamma,
        t0: params.t0,
        y0: params.x0(),
    };
    let mut worst_refl = 0.0f64;
    for (t, y) in [(0.5, 0.9), (1.5, 1.8)] {
        let a = transition_kernel(params, t, y, ctrl)?;
        let b = transition_kernel(&mirrored, t, params.t0 + t - y, ctrl)?;
        worst_refl = worst_refl.max((a - b).abs());
    }
    Ok(vec![
        Check::within("kernel_convolution_consistency", 4, worst_conv, 1e-6),
        Check::within("kernel_reflection_symmetry", 6, worst_refl, 1e-12),
    ])
}

/// Criterion 8: saddle-point asymptotics of the Green's function and the
/// boundary-density asymptotics.
pub fn check_asymptotics(params: &ModelParams, ctrl: &SeriesControl) -> Result<Vec<Check>> {
    let angles = [
        drift_direction(params.gamma).alpha(),
        FRAC_PI_3,
        FRAC_PI_6,
    ];
    let mut worst60 = 0.0f64;
    let mut worst120 = 0.0f64;
    let mut halving = f64::INFINITY;
    let mut detail = String::new();
    for &alpha in &angles {
        let e60 = (green_ratio(params, 60.0, alpha, ctrl)? - 1.0).abs();
        let e120 = (green_ratio(params, 120.0, alpha, ctrl)? - 1.0).abs();
        worst60 = worst60.max(e60);
        worst120 = worst120.max(e120);
        halving = halving.min(e60 / e120);
        detail.push_str(&format!("alpha={alpha:.4}: |ratio-1| {e60:.4} @r=60, {e120:.4} @r=120; "));
    }
    let boundary = (boundary_density_ratio_f1(params, 80.0, ctrl)? - 1.0).abs();
    Ok(vec![
        Check::within("green_ratio_r60", 8, worst60, 0.05).with_detail(detail.clone()),
        Check::within("green_ratio_r120", 8, worst120, 0.025).with_detail(detail),
        Check::at_least("green_ratio_error_halving", 8, halving, 1.6),
        Check::within("boundary_density_ratio_y80", 8, boundary, 0.05),
    ])
}

/// Criterion 10 (and related documented source-formula discrepancies).
pub fn check_documented_discrepancies(
    params: &ModelParams,
    ctrl: &SeriesControl,
    qctrl: &QuadControl,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    // The literal edge-exit sinh form equals the accepted series times
    // exp(-2 gamma x0) (edge 2), a genuine inconsistency in the source
    // formula. The check passes when the discrepancy is reproduced.
    let lit = exit_prob_sinh_literal(params, Edge::Two, ctrl)?;
    let accepted = exit_prob_edge(params, drift_direction(params.gamma), Edge::Two, ctrl)?;
    let factor = (-2.0 * params.gamma * params.x0()).exp();
    let mut check = Check::within(
        "edge_exit_sinh_literal_vs_accepted",
        10,
        lit - accepted * factor,
        1e-12,
    )
    .with_detail(format!(
        "literal sinh form {lit:.6} vs accepted series {accepted:.6} \
         (ratio exp(-2 gamma x0) = {factor:.6}); accepted value is backed by the \
         partition identity and the simulator"
    ));
    if is_reference(params) {
        check.pass = check.pass && (lit - 0.1286).abs() < 5e-4 && (accepted - 0.3497).abs() < 5e-4;
    }
    checks.push(check);

    // The bare survival-tail packaging misses the 2/gamma^2 factors;
    // the corrected form is verified at t = 120 where the O(1/t) correction
    // has decayed.
    let persistence = persistence_probability(params, ctrl)?;
    let tail120 = survival_probability(params, 120.0, ctrl, qctrl)? - persistence;
    let corrected = survival_tail_asymptotic(params, 120.0, ctrl)?;
    let literal = survival_tail_literal(params, 30.0, ctrl)?;
    let tail30 = survival_probability(params, 30.0, ctrl, qctrl)? - persistence;
    checks.push(
        Check::within(
            "survival_tail_corrected_asymptotic_t120",
            10,
            tail120 / corrected - 1.0,
            0.10,
        )
        .with_detail(format!(
            "bare literal tail form is off by x{:.2} at t=30 (missing 2/gamma^2 factors)",
            tail30 / literal
        )),
    );
    Ok(checks)
}

/// All fast (non-Monte-Carlo) checks for one parameter set.
pub fn run_fast(
    params: &ModelParams,
    ctrl: &SeriesControl,
    qctrl: &QuadControl,
) -> Result<Vec<Check>> {
    params.validate()?;
    let mut checks = Vec::new();
    checks.push(check_partition_identity(params, ctrl)?);
    checks.extend(check_persistence_forms(params, ctrl)?);
    checks.push(check_probability_partition(params, ctrl)?);
    checks.extend(check_mass_identities(params, ctrl, qctrl)?);
    checks.extend(check_harmonicity(params, ctrl)?);
    checks.extend(check_boundary_vanishing(params, ctrl)?);
    checks.push(check_chapman_kolmogorov(params, ctrl, qctrl)?);
    checks.extend(check_kernel_consistency(params, ctrl, qctrl)?);
    checks.extend(check_asymptotics(params, ctrl)?);
    checks.extend(check_documented_discrepancies(params, ctrl, qctrl)?);
    Ok(checks)
}

/// Compare a Monte Carlo histogram against a closed-form density bin by bin.
///
/// Bins with at least 100 hits are checked at 3 sigma; at most 1% of the
/// checked bins may fall outside (floor of the count). Returns the check
/// plus the number of checked bins.
fn histogram_check<F>(
    name: &str,
    hist: &Histogram,
    exact_density: F,
    qctrl: &QuadControl,
) -> Result<Check>
where
    F: Fn(f64) -> f64,
{
    let mut checked = 0usize;
    let mut outside = 0usize;
    let mut worst_sigma = 0.0f64;
    for b in hist.bins() {
        if b.count < 100 {
            continue;
        }
        let exact_mass = integrate(&exact_density, b.left, b.right, qctrl)?.value;
        let exact = exact_mass / (b.right - b.left);
        checked += 1;
        let sigmas = (b.density - exact).abs() / b.std_error;
        worst_sigma = worst_sigma.max(sigmas);
        if sigmas > 3.0 {
            outside += 1;
        }
    }
    let allowed = checked / 100;
    let pass = checked > 0 && outside <= allowed;
    Ok(Check {
        name: name.into(),
        criterion: 9,
        measured: outside as f64,
        tolerance: allowed as f64,
        pass,
        detail: Some(format!(
            "{checked} bins with >= 100 hits; worst deviation {worst_sigma:.2} sigma"
        )),
    })
}

/// Criterion 9: the full Monte Carlo cross-validation battery.
pub fn run_monte_carlo(
    params: &ModelParams,
    cfg: &McConfig,
    ctrl: &SeriesControl,
    qctrl: &QuadControl,
) -> Result<Vec<Check>> {
    params.validate()?;
    cfg.validate()?;
    let mut checks = Vec::new();
    let alpha = drift_direction(params.gamma);

    let records = simulate_all(params, cfg)?;
    let (e1, e2, surv) = exit_probabilities_from_records(&records);

    let exact1 = exit_prob_edge(params, alpha, Edge::One, ctrl)?;
    let exact2 = exit_prob_edge(params, alpha, Edge::Two, ctrl)?;
    let exact_p = persistence_probability(params, ctrl)?;
    for (name, est, exact) in [
        ("mc_exit_prob_edge1", e1, exact1),
        ("mc_exit_prob_edge2", e2, exact2),
        ("mc_persistence", surv, exact_p),
    ] {
        checks.push(
            Check {
                name: name.into(),
                criterion: 9,
                measured: (est.value - exact) / est.std_error,
                tolerance: 3.0,
                pass: (est.value - exact).abs() <= 3.0 * est.std_error,
                detail: Some(format!(
                    "estimate {:.6} +- {:.1e}, series {exact:.6}",
                    est.value, est.std_error
                )),
            },
        );
    }

    // Exit-time and exit-position histograms against f_T and f1. Recorded
    // exit times live on the lattice {k dt}; bin edges are offset by half a
    // slot so that rounding of k*dt can never flip an edge slot (mass
    // ~ f*dt, several sigma at 1e6 paths) into the neighboring bin.
    let horizon_cap = cfg.horizon.min(12.0);
    let off = 0.5 * cfg.dt;
    let hists = histograms_from_records(
        &records,
        params.t0,
        HistogramSpec {
            lo: -off,
            hi: horizon_cap - off,
            bins: (horizon_cap / 0.05).round() as usize,
        },
        HistogramSpec {
            lo: params.t0 - off,
            hi: params.t0 + 12.0 - off,
            bins: 240,
        },
        HistogramSpec {
            lo: params.t0 - off,
            hi: params.t0 + 12.0 - off,
            bins: 240,
        },
    )?;
    checks.push(histogram_check(
        "mc_exit_time_histogram_vs_ft",
        &hists.exit_time,
        |t| {
            if t <= 0.0 {
                0.0
            } else {
                exit_time_density(params, t, ctrl).unwrap_or(0.0)
            }
        },
        qctrl,
    )?);
    checks.push(histogram_check(
        "mc_exit_height_histogram_vs_f1",
        &hists.y_t1,
        |y| {
            if y <= params.t0 {
                0.0
            } else {
                exit_density_f1(params, y, ctrl).unwrap_or(0.0)
            }
        },
        qctrl,
    )?);

    // Transition density at t = 1.
    let t_slice = 1.0;
    let spec = HistogramSpec {
        lo: 0.0,
        hi: params.t0 + t_slice,
        bins: 300,
    };
    let (slice_hist, mass) = estimate_transition_density(params, t_slice, cfg, spec)?;
    checks.push(histogram_check(
        "mc_transition_density_histogram_t1",
        &slice_hist,
        |y| transition_kernel(params, t_slice, y.clamp(0.0, params.t0 + t_slice), ctrl).unwrap_or(0.0),
        qctrl,
    )?);
    let exact_mass = survival_probability(params, t_slice, ctrl, qctrl)?;
    checks.push(Check {
        name: "mc_transition_mass_t1".into(),
        criterion: 9,
        measured: (mass.value - exact_mass) / mass.std_error,
        tolerance: 3.0,
        pass: (mass.value - exact_mass).abs() <= 3.0 * mass.std_error,
        detail: Some(format!(
            "estimate {:.6} +- {:.1e}, survival {exact_mass:.6}",
            mass.value, mass.std_error
        )),
    });

    // Conditioned exit functional at three arc directions. The simulator
    // sees no exits past its horizon, so the estimator targets the
    // horizon-truncated functional; the analytic tail (quadrature of the
    // same closed forms) is subtracted from the series side before the
    // 3-sigma comparison. At horizon 40 the tail reaches ~2e-3 for arc
    // points away from the drift direction, several sigma at 1e6 paths.
    for frac in [1.0, 2.0, 3.0] {
        let a = Direction::new(frac * FRAC_PI_8)?;
        let pt = saddle_point(a, params.gamma);
        let est = conditioned_functional_from_records(pt, params.t0, &records);
        let h = h_interior(params.start(), pt, params.gamma, ctrl)?.value;
        let full = (params.x0() * pt.p + params.y0 * pt.q).exp() - h;
        let tail = conditioned_functional_horizon_tail(params, pt, cfg.horizon, ctrl, qctrl)?;
        let exact = full - tail;
        checks.push(Check {
            name: format!("mc_conditioned_functional_alpha_{frac}pi8"),
            criterion: 9,
            measured: (est.value - exact) / est.std_error,
            tolerance: 3.0,
            pass: (est.value - exact).abs() <= 3.0 * est.std_error,
            detail: Some(format!(
                "estimate {:.6} +- {:.1e}, series {full:.6} minus horizon tail {tail:.2e}",
                est.value, est.std_error
            )),
        });
    }
    Ok(checks)
}

/// Report of a validation run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Report {
    pub level: Level,
    pub params: ModelParams,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Run the battery at the requested level.
pub fn run(
    params: &ModelParams,
    level: Level,
    ctrl: &SeriesControl,
    qctrl: &QuadControl,
    cfg: &McConfig,
) -> Result<Report> {
    let mut checks = run_fast(params, ctrl, qctrl)?;
    if level == Level::Full {
        checks.extend(run_monte_carlo(params, cfg, ctrl, qctrl)?);
    }
    let passed = checks.iter().all(|c| c.pass);
    Ok(Report {
        level,
        params: *params,
        checks,
        passed,
    })
}
