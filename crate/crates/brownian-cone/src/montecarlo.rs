//! Independent simulation oracle: the drifted height process against the
//! two linear boundaries of the cone, with Brownian-bridge crossing
//! corrections, producing exit records and statistical estimates for every
//! closed-form quantity.
//!
//! Between grid points the height is a Brownian bridge and both boundaries
//! are linear, so the within-step crossing probability is exactly
//! `exp(-2 d_i d_{i+1} / dt)` per boundary (`d` = gap to the boundary at the
//! step ends). Sampling those events removes the O(sqrt(dt)) discretization
//! bias of the bare grid walk; the joint double-crossing event inside one
//! step is ignored (probability `exp(-O(t0^2/dt))`, far below Monte Carlo
//! resolution at the scales simulated here).
//!
//! Reproducibility contract: path `i` of a run with seed `s` consumes the
//! ChaCha8 stream with stream id `i` under the key derived from `s` by
//! SplitMix64 expansion (`ChaCha8Rng::seed_from_u64(s)` + `set_stream(i)`).
//! Results are therefore bit-identical across runs and across any number of
//! worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonics::{check_on_closed_arc, persistence_probability};
use crate::kernel::{ModelParams, ParabolaPoint};
use crate::numerics::{
    Estimate, Histogram, HistogramSpec, QuadControl, RunningStats, SeriesControl,
};

/// Simulation configuration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McConfig {
    pub paths: u64,
    /// Grid step; exits are bridge-corrected inside each step and reported
    /// at the right grid endpoint.
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            dt: 1e-3,
            horizon: 40.0,
            seed: 0,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths < 1 {
            return Err(Error::InvalidParams("paths must be >= 1".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParams(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !(self.horizon > 0.0) || self.dt > self.horizon {
            return Err(Error::InvalidParams(format!(
                "horizon must satisfy horizon >= dt > 0, got horizon = {}, dt = {}",
                self.horizon, self.dt
            )));
        }
        Ok(())
    }

    fn steps_to(&self, t: f64) -> u64 {
        ((t / self.dt).round() as u64).max(1)
    }
}

/// Configuration sanity warnings that need the closed forms.
///
/// Reports (a) the double-crossing caveat when the cone is narrow relative
/// to the step, and (b) the analytic horizon-truncation bound
/// `P(T in (horizon, inf)) <= P(T > horizon) - P(T = inf)` whenever it is
/// not negligible against the Monte Carlo standard error.
pub fn config_warnings(
    params: &ModelParams,
    cfg: &McConfig,
    ctrl: &SeriesControl,
    qctrl: &QuadControl,
) -> Result<Vec<String>> {
    params.validate()?;
    cfg.validate()?;
    let mut warnings = Vec::new();
    if params.t0 < 10.0 * cfg.dt.sqrt() {
        warnings.push(format!(
            "cone apex t0 = {} is within 10 sqrt(dt) = {}: independent-boundary bridge \
             correction may miss double crossings",
            params.t0,
            10.0 * cfg.dt.sqrt()
        ));
    }
    let persistence = persistence_probability(params, ctrl)?;
    let survival = crate::densities::survival_probability(params, cfg.horizon, ctrl, qctrl)?;
    let horizon_bias = (survival - persistence).max(0.0);
    let se = (persistence * (1.0 - persistence) / cfg.paths as f64).sqrt();
    if horizon_bias > 0.1 * se {
        warnings.push(format!(
            "horizon bias bound {horizon_bias:.3e} exceeds 0.1 x standard error {se:.3e}; \
             consider a larger horizon"
        ));
    }
    Ok(warnings)
}

/// Outcome of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ExitOutcome {
    Edge1,
    Edge2,
    Survived,
}

/// One simulated path outcome in cone coordinates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExitRecord {
    pub outcome: ExitOutcome,
    pub exit_time: Option<f64>,
    /// `Y(T)`: equals `t0 + exit_time` on edge 1 and `0` on edge 2.
    pub exit_height: Option<f64>,
}

impl ExitRecord {
    fn survived() -> Self {
        Self {
            outcome: ExitOutcome::Survived,
            exit_time: None,
            exit_height: None,
        }
    }

    fn edge(outcome: ExitOutcome, t0: f64, time: f64) -> Self {
        let height = match outcome {
            ExitOutcome::Edge1 => t0 + time,
            ExitOutcome::Edge2 => 0.0,
            ExitOutcome::Survived => unreachable!(),
        };
        Self {
            outcome,
            exit_time: Some(time),
            exit_height: Some(height),
        }
    }
}

/// The per-path generator mandated by the reproducibility contract.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

enum PathState {
    Exited(ExitOutcome, f64),
    Alive(f64),
}

/// Advance one path on the dt-grid until it exits or reaches `n_steps`.
///
/// Bridge tests are only sampled when the crossing probability exceeds
/// exp(-45); the skip depends on the path state alone, so each path stream
/// is consumed identically no matter how paths are scheduled.
fn run_path(params: &ModelParams, cfg: &McConfig, rng: &mut ChaCha8Rng, n_steps: u64) -> PathState {
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let drift = params.gamma * dt;
    let product_threshold = 22.5 * dt;

    let mut y = params.y0;
    let mut gap_up = params.t0 - y;
    for step in 1..=n_steps {
        let z: f64 = StandardNormal.sample(rng);
        let y_next = y + drift + sqrt_dt * z;
        let upper_next = params.t0 + step as f64 * dt;
        let gap_up_next = upper_next - y_next;

        if y_next <= 0.0 {
            return PathState::Exited(ExitOutcome::Edge2, step as f64 * dt);
        }
        if gap_up_next <= 0.0 {
            return PathState::Exited(ExitOutcome::Edge1, step as f64 * dt);
        }

        // Bridge crossing exponents 2 d_i d_{i+1} / dt for the two
        // boundaries; an Exp(1) draw exceeding the exponent is a crossing.
        let prod_lo = y * y_next;
        let prod_up = gap_up * gap_up_next;
        let crossed_lo = prod_lo <= product_threshold && {
            let e: f64 = Exp1.sample(rng);
            e >= 2.0 * prod_lo / dt
        };
        let crossed_up = prod_up <= product_threshold && {
            let e: f64 = Exp1.sample(rng);
            e >= 2.0 * prod_up / dt
        };
        match (crossed_lo, crossed_up) {
            (true, false) => return PathState::Exited(ExitOutcome::Edge2, step as f64 * dt),
            (false, true) => return PathState::Exited(ExitOutcome::Edge1, step as f64 * dt),
            (true, true) => {
                // Both flagged within one step: attribute to the more likely
                // crossing (smaller exponent), ties to the fixed edge.
                let out = if prod_lo <= prod_up {
                    ExitOutcome::Edge2
                } else {
                    ExitOutcome::Edge1
                };
                return PathState::Exited(out, step as f64 * dt);
            }
            (false, false) => {}
        }
        y = y_next;
        gap_up = gap_up_next;
    }
    PathState::Alive(y)
}

/// Simulate one path to the horizon.
pub fn simulate_exit(params: &ModelParams, cfg: &McConfig, path_index: u64) -> ExitRecord {
    let mut rng = path_rng(cfg.seed, path_index);
    match run_path(params, cfg, &mut rng, cfg.steps_to(cfg.horizon)) {
        PathState::Exited(outcome, time) => ExitRecord::edge(outcome, params.t0, time),
        PathState::Alive(_) => ExitRecord::survived(),
    }
}

/// Simulate one path up to grid time `t`; `Some(height)` if still alive.
pub fn simulate_height_at(
    params: &ModelParams,
    cfg: &McConfig,
    path_index: u64,
    t: f64,
) -> Option<f64> {
    let mut rng = path_rng(cfg.seed, path_index);
    match run_path(params, cfg, &mut rng, cfg.steps_to(t)) {
        PathState::Exited(..) => None,
        PathState::Alive(y) => Some(y),
    }
}

/// Simulate every path (in parallel; output order is by path index).
pub fn simulate_all(params: &ModelParams, cfg: &McConfig) -> Result<Vec<ExitRecord>> {
    params.validate()?;
    cfg.validate()?;
    Ok((0..cfg.paths)
        .into_par_iter()
        .map(|i| simulate_exit(params, cfg, i))
        .collect())
}

fn probability_estimate(count: u64, n: u64) -> Estimate {
    let nf = n as f64;
    let p = count as f64 / nf;
    let std_error = if n < 2 {
        0.0
    } else {
        (p * (1.0 - p) / (nf - 1.0)).sqrt()
    };
    Estimate {
        value: p,
        std_error,
        n,
    }
}

/// Exit/persistence probability estimates from a set of records. The three
/// values sum to one exactly: the survived estimate is `1 - p1 - p2`.
pub fn exit_probabilities_from_records(records: &[ExitRecord]) -> (Estimate, Estimate, Estimate) {
    let n = records.len() as u64;
    let c1 = records
        .iter()
        .filter(|r| r.outcome == ExitOutcome::Edge1)
        .count() as u64;
    let c2 = records
        .iter()
        .filter(|r| r.outcome == ExitOutcome::Edge2)
        .count() as u64;
    let e1 = probability_estimate(c1, n);
    let e2 = probability_estimate(c2, n);
    let mut surv = probability_estimate(n - c1 - c2, n);
    surv.value = 1.0 - e1.value - e2.value;
    (e1, e2, surv)
}

/// Estimate `(P(Edge1), P(Edge2), P(Survived))` with standard errors.
pub fn estimate_exit_probabilities(
    params: &ModelParams,
    cfg: &McConfig,
) -> Result<(Estimate, Estimate, Estimate)> {
    Ok(exit_probabilities_from_records(&simulate_all(params, cfg)?))
}

/// Histograms of the exit time and of the exit positions on each edge.
#[derive(Debug, Clone)]
pub struct ExitHistograms {
    pub exit_time: Histogram,
    /// Exit height `Y(T1) = t0 + T1` on the moving edge.
    pub y_t1: Histogram,
    /// Exit abscissa `X(T2) = t0 + T2` on the fixed edge.
    pub x_t2: Histogram,
}

/// Build the three exit histograms from records.
pub fn histograms_from_records(
    records: &[ExitRecord],
    t0: f64,
    time_spec: HistogramSpec,
    y1_spec: HistogramSpec,
    x2_spec: HistogramSpec,
) -> Result<ExitHistograms> {
    time_spec.validate()?;
    y1_spec.validate()?;
    x2_spec.validate()?;
    let mut exit_time = Histogram::new(time_spec);
    let mut y_t1 = Histogram::new(y1_spec);
    let mut x_t2 = Histogram::new(x2_spec);
    for r in records {
        match (r.outcome, r.exit_time) {
            (ExitOutcome::Edge1, Some(t)) => {
                exit_time.record(t);
                y_t1.record(t0 + t);
                x_t2.record_miss();
            }
            (ExitOutcome::Edge2, Some(t)) => {
                exit_time.record(t);
                y_t1.record_miss();
                x_t2.record(t0 + t);
            }
            _ => {
                exit_time.record_miss();
                y_t1.record_miss();
                x_t2.record_miss();
            }
        }
    }
    Ok(ExitHistograms {
        exit_time,
        y_t1,
        x_t2,
    })
}

/// Simulate and histogram exit times and positions.
pub fn estimate_histograms(
    params: &ModelParams,
    cfg: &McConfig,
    time_spec: HistogramSpec,
    y1_spec: HistogramSpec,
    x2_spec: HistogramSpec,
) -> Result<ExitHistograms> {
    let records = simulate_all(params, cfg)?;
    histograms_from_records(&records, params.t0, time_spec, y1_spec, x2_spec)
}

/// Monte Carlo estimate of `E(exp(X_T p + Y_T q); T < infinity)` from
/// records: on exit `X_T + Y_T = t0 + T` with one coordinate zero, so the
/// weight is `exp((t0+T) q)` on edge 1 and `exp((t0+T) p)` on edge 2;
/// surviving paths contribute zero.
pub fn conditioned_functional_from_records(
    point: ParabolaPoint,
    t0: f64,
    records: &[ExitRecord],
) -> Estimate {
    let mut stats = RunningStats::new();
    for r in records {
        let w = match (r.outcome, r.exit_time) {
            (ExitOutcome::Edge1, Some(t)) => (point.q * (t0 + t)).exp(),
            (ExitOutcome::Edge2, Some(t)) => (point.p * (t0 + t)).exp(),
            _ => 0.0,
        };
        stats.push(w);
    }
    stats.estimate()
}

/// Estimate the conditioned exit functional for an arc point.
pub fn estimate_conditioned_functional(
    params: &ModelParams,
    point: ParabolaPoint,
    cfg: &McConfig,
) -> Result<Estimate> {
    check_on_closed_arc(point, params.gamma)?;
    let records = simulate_all(params, cfg)?;
    Ok(conditioned_functional_from_records(point, params.t0, &records))
}

/// Empirical sub-probability density of the height at grid time `t` among
/// surviving paths, plus the survival mass estimate.
pub fn estimate_transition_density(
    params: &ModelParams,
    t: f64,
    cfg: &McConfig,
    spec: HistogramSpec,
) -> Result<(Histogram, Estimate)> {
    params.validate()?;
    cfg.validate()?;
    spec.validate()?;
    if t >= cfg.horizon {
        return Err(Error::InvalidParams(format!(
            "transition-density time t = {t} must be below the horizon {}",
            cfg.horizon
        )));
    }
    let (hist, alive) = (0..cfg.paths)
        .into_par_iter()
        .fold(
            || (Histogram::new(spec), 0u64),
            |(mut h, mut alive), i| {
                match simulate_height_at(params, cfg, i, t) {
                    Some(y) => {
                        h.record(y);
                        alive += 1;
                    }
                    None => h.record_miss(),
                }
                (h, alive)
            },
        )
        .reduce(
            || (Histogram::new(spec), 0u64),
            |(ha, aa), (hb, ab)| (ha.merge(hb), aa + ab),
        );
    Ok((hist, probability_estimate(alive, cfg.paths)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_star() -> ModelParams {
        ModelParams::new(0.5, 2.0, 1.0).unwrap()
    }

    fn small_cfg() -> McConfig {
        McConfig {
            paths: 4_000,
            dt: 1e-3,
            horizon: 25.0,
            seed: 7,
        }
    }

    #[test]
    fn config_validation() {
        assert!(McConfig {
            paths: 0,
            ..McConfig::default()
        }
        .validate()
        .is_err());
        assert!(McConfig {
            dt: 0.0,
            ..McConfig::default()
        }
        .validate()
        .is_err());
        assert!(McConfig {
            dt: 2.0,
            horizon: 1.0,
            ..McConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn record_invariants_hold() {
        let params = p_star();
        let cfg = small_cfg();
        for i in 0..500 {
            let r = simulate_exit(&params, &cfg, i);
            match r.outcome {
                ExitOutcome::Edge1 => {
                    assert_eq!(r.exit_height.unwrap(), params.t0 + r.exit_time.unwrap());
                }
                ExitOutcome::Edge2 => assert_eq!(r.exit_height.unwrap(), 0.0),
                ExitOutcome::Survived => {
                    assert!(r.exit_time.is_none() && r.exit_height.is_none());
                }
            }
        }
    }

    #[test]
    fn fixed_seed_and_index_are_bit_reproducible_and_worker_invariant() {
        let params = p_star();
        let cfg = small_cfg();
        let all = simulate_all(&params, &cfg).unwrap();
        for &i in &[0u64, 1, 17, 399, 3999] {
            let r = simulate_exit(&params, &cfg, i);
            assert_eq!(r, all[i as usize]);
        }
        let again = simulate_all(&params, &cfg).unwrap();
        assert_eq!(all, again);
    }

    #[test]
    fn accounting_is_exact() {
        let params = p_star();
        let cfg = small_cfg();
        let records = simulate_all(&params, &cfg).unwrap();
        let n1 = records.iter().filter(|r| r.outcome == ExitOutcome::Edge1).count();
        let n2 = records.iter().filter(|r| r.outcome == ExitOutcome::Edge2).count();
        let ns = records.iter().filter(|r| r.outcome == ExitOutcome::Survived).count();
        assert_eq!(n1 + n2 + ns, records.len());
        let (e1, e2, s) = exit_probabilities_from_records(&records);
        assert_eq!(e1.value + e2.value + s.value, 1.0);
    }

    #[test]
    fn start_next_to_the_fixed_edge_exits_there_immediately() {
        let params = ModelParams::new(0.5, 2.0, 1e-9).unwrap();
        let cfg = McConfig {
            paths: 300,
            dt: 1e-3,
            horizon: 5.0,
            seed: 3,
        };
        let records = simulate_all(&params, &cfg).unwrap();
        let edge2 = records
            .iter()
            .filter(|r| r.outcome == ExitOutcome::Edge2)
            .count();
        assert!(edge2 == records.len(), "{edge2} of {}", records.len());
        assert!(records.iter().all(|r| r.exit_time.unwrap() <= 10.0 * cfg.dt));
    }

    #[test]
    fn strong_upward_drift_prefers_the_moving_edge() {
        let params = ModelParams::new(0.9, 2.0, 1.0).unwrap();
        let cfg = McConfig {
            paths: 2_000,
            dt: 1e-3,
            horizon: 10.0,
            seed: 11,
        };
        let (e1, e2, _) = estimate_exit_probabilities(&params, &cfg).unwrap();
        assert!(e1.value > e2.value, "{} vs {}", e1.value, e2.value);
    }

    #[test]
    fn single_path_gives_degenerate_one_hot_estimate() {
        let params = p_star();
        let cfg = McConfig {
            paths: 1,
            dt: 1e-3,
            horizon: 5.0,
            seed: 1,
        };
        let (e1, e2, s) = estimate_exit_probabilities(&params, &cfg).unwrap();
        for e in [e1, e2, s] {
            assert_eq!(e.std_error, 0.0);
            assert!(e.value == 0.0 || e.value == 1.0);
        }
        assert_eq!(e1.value + e2.value + s.value, 1.0);
    }

    #[test]
    fn survival_fraction_tracks_the_series_value() {
        // 4e4 paths keep this test quick; 3 sigma of the persistence
        // estimate is ~0.7%.
        let params = p_star();
        let cfg = McConfig {
            paths: 40_000,
            dt: 2e-3,
            horizon: 30.0,
            seed: 2024,
        };
        let (_, _, s) = estimate_exit_probabilities(&params, &cfg).unwrap();
        assert!(
            (s.value - 0.30062580086898433).abs() < 3.0 * s.std_error,
            "{} +- {}",
            s.value,
            s.std_error
        );
    }

    #[test]
    fn transition_histogram_respects_the_cone() {
        let params = p_star();
        let cfg = McConfig {
            paths: 5_000,
            dt: 1e-3,
            horizon: 5.0,
            seed: 5,
        };
        let spec = HistogramSpec {
            lo: -1.0,
            hi: 4.0,
            bins: 50,
        };
        let (hist, mass) = estimate_transition_density(&params, 1.0, &cfg, spec).unwrap();
        // Nothing below 0 or above t0 + t = 3.
        for b in hist.bins() {
            if b.right <= 0.0 || b.left >= 3.0 {
                assert_eq!(b.count, 0, "bin [{}, {}]", b.left, b.right);
            }
        }
        assert!(mass.value > 0.3 && mass.value < 0.9);
    }

    #[test]
    fn histogram_supports_start_at_the_apex() {
        let params = p_star();
        let cfg = small_cfg();
        let records = simulate_all(&params, &cfg).unwrap();
        let h = histograms_from_records(
            &records,
            params.t0,
            HistogramSpec {
                lo: 0.0,
                hi: cfg.horizon,
                bins: 100,
            },
            HistogramSpec {
                lo: 0.0,
                hi: 20.0,
                bins: 100,
            },
            HistogramSpec {
                lo: 0.0,
                hi: 20.0,
                bins: 100,
            },
        )
        .unwrap();
        // Y(T1) = t0 + T1 never falls below t0.
        for b in h.y_t1.bins() {
            if b.right <= params.t0 {
                assert_eq!(b.count, 0);
            }
        }
        // Total exit-time mass equals the exited fraction.
        let (e1, e2, _) = exit_probabilities_from_records(&records);
        assert!((h.exit_time.mass() - (e1.value + e2.value)).abs() < 1e-12);
    }
}
