//! Machine-readable command execution: JSON records for scalar results, CSV
//! for curves and histograms, and the run manifest embedded in every output
//! so a run can be replayed byte for byte.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::densities::{
    boundary_asymptotic_constants, exit_density_f1, exit_density_f2, exit_time_density,
    green_asymptotic, green_function, survival_probability, transition_kernel,
};
use crate::error::{Error, Result};
use crate::harmonics::{
    boundary_laplace_l1, conditioned_exit_functional, exit_prob_edge, h_edge, h_interior,
    persistence_probability, Edge, EdgeDirection,
};
use crate::kernel::{
    comp_point, drift_direction, kernel, saddle_point, Direction, ModelParams, ParabolaPoint,
};
use crate::montecarlo::{
    config_warnings, exit_probabilities_from_records, histograms_from_records, simulate_all,
    McConfig,
};
use crate::numerics::{Estimate, HistogramSpec, QuadControl, SeriesControl};
use crate::validate::{run as run_checks, Level, Report};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance record embedded in every output; replaying `command` through
/// the binary reproduces the output byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: ModelParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesControl>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadControl>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    pub artifact_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A scalar argument or an inclusive `start:end:step` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarOrRange {
    Scalar(f64),
    Range { start: f64, end: f64, step: f64 },
}

impl ScalarOrRange {
    pub fn is_range(&self) -> bool {
        matches!(self, ScalarOrRange::Range { .. })
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            ScalarOrRange::Scalar(v) => vec![v],
            ScalarOrRange::Range { start, end, step } => {
                let mut out = Vec::new();
                let mut k = 0u64;
                loop {
                    let v = start + k as f64 * step;
                    if v > end + 1e-9 * step.abs() {
                        break;
                    }
                    out.push(v);
                    k += 1;
                }
                out
            }
        }
    }

    pub fn scalar(&self) -> Result<f64> {
        match *self {
            ScalarOrRange::Scalar(v) => Ok(v),
            ScalarOrRange::Range { .. } => Err(Error::InvalidParams(
                "a range is not accepted for this argument".into(),
            )),
        }
    }
}

impl FromStr for ScalarOrRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidParams(format!("not a number: {t}")))
        };
        match parts.as_slice() {
            [v] => Ok(ScalarOrRange::Scalar(parse(v)?)),
            [a, b, c] => {
                let (start, end, step) = (parse(a)?, parse(b)?, parse(c)?);
                if !(step > 0.0) || end < start {
                    return Err(Error::InvalidParams(format!(
                        "range must be start:end:step with step > 0 and end >= start, got {s}"
                    )));
                }
                Ok(ScalarOrRange::Range { start, end, step })
            }
            _ => Err(Error::InvalidParams(format!(
                "expected a number or start:end:step, got {s}"
            ))),
        }
    }
}

impl fmt::Display for ScalarOrRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ScalarOrRange::Scalar(v) => write!(f, "{v}"),
            ScalarOrRange::Range { start, end, step } => write!(f, "{start}:{end}:{step}"),
        }
    }
}

/// `lo:hi:n` histogram bin specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinsArg(pub HistogramSpec);

impl FromStr for BinsArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParams(format!("expected lo:hi:n, got {s}")));
        }
        let lo = parts[0]
            .parse::<f64>()
            .map_err(|_| Error::InvalidParams(format!("not a number: {}", parts[0])))?;
        let hi = parts[1]
            .parse::<f64>()
            .map_err(|_| Error::InvalidParams(format!("not a number: {}", parts[1])))?;
        let bins = parts[2]
            .parse::<usize>()
            .map_err(|_| Error::InvalidParams(format!("not a bin count: {}", parts[2])))?;
        let spec = HistogramSpec { lo, hi, bins };
        spec.validate()?;
        Ok(BinsArg(spec))
    }
}

impl fmt::Display for BinsArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.0.lo, self.0.hi, self.0.bins)
    }
}

/// Evaluable quantities of the `eval` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Kernel,
    Saddle,
    CompSeq,
    Harmonic,
    Persistence,
    ExitProb,
    LaplaceL1,
    F1,
    F2,
    Ft,
    Survival,
    TransitionKernel,
    Green,
    GreenAsymptotic,
    BoundaryConstants,
    ConditionedFunctional,
}

impl Quantity {
    pub const ALL: [&'static str; 16] = [
        "kernel",
        "saddle",
        "comp-seq",
        "harmonic",
        "persistence",
        "exit-prob",
        "laplace-l1",
        "f1",
        "f2",
        "ft",
        "survival",
        "transition-kernel",
        "green",
        "green-asymptotic",
        "boundary-constants",
        "conditioned-functional",
    ];
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidParams(format!("unknown quantity: {s}")))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("quantity serializes");
        write!(f, "{}", v.as_str().expect("string"))
    }
}

/// Resolved arguments of one `eval` invocation.
#[derive(Debug, Clone)]
pub struct EvalArgs {
    pub quantity: Quantity,
    pub params: ModelParams,
    pub series: SeriesControl,
    pub quad: QuadControl,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub edge: Option<u8>,
    pub edge_dir: Option<EdgeDirection>,
    pub x: Option<ScalarOrRange>,
    pub y: Option<ScalarOrRange>,
    pub t: Option<ScalarOrRange>,
    pub n_min: i64,
    pub n_max: i64,
}

impl EvalArgs {
    pub fn new(quantity: Quantity, params: ModelParams) -> Self {
        Self {
            quantity,
            params,
            series: SeriesControl::default(),
            quad: QuadControl::default(),
            alpha: None,
            p: None,
            q: None,
            edge: None,
            edge_dir: None,
            x: None,
            y: None,
            t: None,
            n_min: -5,
            n_max: 5,
        }
    }

    fn canonical_command(&self) -> String {
        let mut cmd = format!(
            "eval {} --gamma {} --t0 {} --y0 {}",
            self.quantity, self.params.gamma, self.params.t0, self.params.y0
        );
        if let Some(a) = self.alpha {
            cmd.push_str(&format!(" --alpha {a}"));
        }
        if let Some(p) = self.p {
            cmd.push_str(&format!(" --p {p}"));
        }
        if let Some(q) = self.q {
            cmd.push_str(&format!(" --q {q}"));
        }
        if let Some(e) = self.edge {
            cmd.push_str(&format!(" --edge {e}"));
        }
        if let Some(d) = self.edge_dir {
            cmd.push_str(&format!(
                " --edge-dir {}",
                match d {
                    EdgeDirection::Alpha0 => "alpha0",
                    EdgeDirection::AlphaPi2 => "alpha-pi2",
                }
            ));
        }
        if let Some(x) = self.x {
            cmd.push_str(&format!(" --x {x}"));
        }
        if let Some(y) = self.y {
            cmd.push_str(&format!(" --y {y}"));
        }
        if let Some(t) = self.t {
            cmd.push_str(&format!(" --t {t}"));
        }
        if self.quantity == Quantity::CompSeq {
            cmd.push_str(&format!(" --n-min {} --n-max {}", self.n_min, self.n_max));
        }
        cmd.push_str(&format!(
            " --series-abs-tol {} --series-max-terms {}",
            self.series.abs_tol, self.series.max_terms
        ));
        cmd.push_str(&format!(
            " --quad-rel-tol {} --quad-abs-tol {} --quad-max-subdivisions {}",
            self.quad.rel_tol, self.quad.abs_tol, self.quad.max_subdivisions
        ));
        cmd
    }

    fn manifest(&self) -> RunManifest {
        RunManifest {
            command: self.canonical_command(),
            params: self.params,
            series: Some(self.series),
            quad: Some(self.quad),
            mc: None,
            artifact_version: ARTIFACT_VERSION.into(),
            seed: None,
        }
    }
}

#[derive(Serialize)]
struct EvalRecord {
    quantity: Quantity,
    inputs: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_pi2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    manifest: RunManifest,
}

impl EvalRecord {
    fn scalar(quantity: Quantity, inputs: serde_json::Value, value: f64, manifest: RunManifest) -> Self {
        Self {
            quantity,
            inputs,
            value: Some(value),
            p: None,
            q: None,
            h0: None,
            h_pi2: None,
            terms_used: None,
            bound: None,
            manifest,
        }
    }
}

fn csv_float(v: f64) -> String {
    // 17 significant digits: round-trip safe for f64.
    format!("{v:.16e}")
}

fn require<T: Copy>(opt: Option<T>, what: &str) -> Result<T> {
    opt.ok_or_else(|| Error::InvalidParams(format!("missing required argument --{what}")))
}

fn direction_or_drift(alpha: Option<f64>, gamma: f64) -> Result<Direction> {
    match alpha {
        Some(a) => Direction::new(a),
        None => Ok(drift_direction(gamma)),
    }
}

/// Render a one-variable curve as CSV with a leading manifest comment.
fn render_curve<F>(name: &str, xs: &[f64], manifest: &RunManifest, mut f: F) -> Result<String>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut out = format!(
        "# manifest {}\n{name},value\n",
        serde_json::to_string(manifest).expect("manifest serializes")
    );
    for &x in xs {
        let v = f(x)?;
        out.push_str(&format!("{},{}\n", csv_float(x), csv_float(v)));
    }
    Ok(out)
}

/// Execute an `eval` request; the returned string is the full stdout payload.
pub fn run_eval(args: &EvalArgs) -> Result<String> {
    args.series.validate()?;
    args.quad.validate()?;
    let params = args.params;
    params.validate()?;
    let manifest = args.manifest();
    let gamma = params.gamma;
    let sc = &args.series;
    let qc = &args.quad;

    let inputs = |extra: serde_json::Value| -> serde_json::Value {
        let mut map = serde_json::json!({
            "gamma": gamma,
            "t0": params.t0,
            "y0": params.y0,
        });
        if let (Some(m), Some(e)) = (map.as_object_mut(), extra.as_object()) {
            for (k, v) in e {
                m.insert(k.clone(), v.clone());
            }
        }
        map
    };

    let json_line = |rec: &EvalRecord| -> Result<String> {
        Ok(format!(
            "{}\n",
            serde_json::to_string(rec).map_err(|e| Error::InvalidParams(e.to_string()))?
        ))
    };

    match args.quantity {
        Quantity::Kernel => {
            let p = require(args.p, "p")?;
            let q = require(args.q, "q")?;
            let rec = EvalRecord::scalar(
                args.quantity,
                inputs(serde_json::json!({"p": p, "q": q})),
                kernel(p, q, gamma),
                manifest,
            );
            json_line(&rec)
        }
        Quantity::Saddle => {
            let alpha = require(args.alpha, "alpha")?;
            let s = saddle_point(Direction::new(alpha)?, gamma);
            let mut rec = EvalRecord::scalar(
                args.quantity,
                inputs(serde_json::json!({"alpha": alpha})),
                0.0,
                manifest,
            );
            rec.value = None;
            rec.p = Some(s.p);
            rec.q = Some(s.q);
            json_line(&rec)
        }
        Quantity::CompSeq => {
            let origin = match (args.p, args.q) {
                (Some(p), Some(q)) => ParabolaPoint::new(p, q),
                _ => saddle_point(direction_or_drift(args.alpha, gamma)?, gamma),
            };
            origin.check_on_parabola(gamma)?;
            if args.n_min > args.n_max {
                return Err(Error::InvalidParams("need n-min <= n-max".into()));
            }
            let mut out = format!(
                "# manifest {}\nn,p,q\n",
                serde_json::to_string(&manifest).expect("manifest serializes")
            );
            for n in args.n_min..=args.n_max {
                let pt = comp_point(origin, gamma, n);
                out.push_str(&format!("{n},{},{}\n", csv_float(pt.p), csv_float(pt.q)));
            }
            Ok(out)
        }
        Quantity::Harmonic => {
            let x = require(args.x, "x")?.scalar()?;
            let y = require(args.y, "y")?.scalar()?;
            let h = match args.edge_dir {
                Some(which) => h_edge((x, y), which, gamma, sc)?,
                None => {
                    let alpha = require(args.alpha, "alpha")?;
                    let origin = saddle_point(Direction::new(alpha)?, gamma);
                    h_interior((x, y), origin, gamma, sc)?
                }
            };
            let mut rec = EvalRecord::scalar(
                args.quantity,
                inputs(serde_json::json!({"x": x, "y": y, "alpha": args.alpha})),
                h.value,
                manifest,
            );
            rec.terms_used = Some(h.terms_used);
            rec.bound = Some(h.truncation_bound);
            json_line(&rec)
        }
        Quantity::Persistence => {
            let v = persistence_probability(&params, sc)?;
            let rec = EvalRecord::scalar(args.quantity, inputs(serde_json::json!({})), v, manifest);
            json_line(&rec)
        }
        Quantity::ExitProb => {
            let edge = match require(args.edge, "edge")? {
                1 => Edge::One,
                2 => Edge::Two,
                e => {
                    return Err(Error::InvalidParams(format!(
                        "edge must be 1 or 2, got {e}"
                    )))
                }
            };
            let alpha = direction_or_drift(args.alpha, gamma)?;
            let v = exit_prob_edge(&params, alpha, edge, sc)?;
            let rec = EvalRecord::scalar(
                args.quantity,
                inputs(serde_json::json!({"alpha": alpha.alpha(), "edge": args.edge})),
                v,
                manifest,
            );
            json_line(&rec)
        }
        Quantity::LaplaceL1 => {
            let q = require(args.q, "q")?;
            let v = boundary_laplace_l1(&params, q, sc)?;
            let rec = EvalRecord::scalar(
                args.quantity,
                inputs(serde_json::json!({"q": q})),
                v,
                manifest,
            );
            json_line(&rec)
        }
        Quantity::ConditionedFunctional => {
            let point = match (args.p, args.q) {
                (Some(p), Some(q)) => ParabolaPoint::new(p, q),
                _ => saddle_point(direction_or_drift(args.alpha, gamma)?, gamma),
            };
            let v = conditioned_exit_functional(&params, point, sc)?;
            let rec = EvalRecord::scalar(
                args.quantity,
                inputs(serde_json::json!({"p": point.p, "q": point.q})),
                v,
                manifest,
            );
            json_line(&rec)
        }
        Quantity::F1 => {
            let y = require(args.y, "y")?;
            if y.is_range() {
                render_curve("y", &y.values(), &manifest, |yy| {
                    exit_density_f1(&params, yy, sc)
                })
            } else {
                let yy = y.scalar()?;
                let rec = EvalRecord::scalar(
                    args.quantity,
                    inputs(serde_json::json!({"y": yy})),
                    exit_density_f1(&params, yy, sc)?,
                    manifest,
                );
                json_line(&rec)
            }
        }
        Quantity::F2 => {
            let x = require(args.x, "x")?;
            if x.is_range() {
                render_curve("x", &x.values(), &manifest, |xx| {
                    exit_density_f2(&params, xx, sc)
                })
            } else {
                let xx = x.scalar()?;
                let rec = EvalRecord::scalar(
                    args.quantity,
                    inputs(serde_json::json!({"x": xx})),
                    exit_density_f2(&params, xx, sc)?,
                    manifest,
                );
                json_line(&rec)
            }
        }
        Quantity::Ft => {
            let t = require(args.t, "t")?;
            if t.is_range() {
                render_curve("t", &t.values(), &manifest, |tt| {
                    exit_time_density(&params, tt, sc)
                })
            } else {
                let tt = t.scalar()?;
                let rec = EvalRecord::scalar(
                    args.quantity,
                    inputs(serde_json::json!({"t": tt})),
                    exit_time_density(&params, tt, sc)?,
                    manifest,
                );
                json_line(&rec)
            }
        }
        Quantity::Survival => {
            let t = require(args.t, "t")?;
            if t.is_range() {
                render_curve("t", &t.values(), &manifest, |tt| {
                    survival_probability(&params, tt, sc, qc)
                })
            } else {
                let tt = t.scalar()?;
                let rec = EvalRecord::scalar(
                    args.quantity,
                    inputs(serde_json::json!({"t": tt})),
                    survival_probability(&params, tt, sc, qc)?,
                    manifest,
                );
                json_line(&rec)
            }
        }
        Quantity::TransitionKernel => {
            let t = require(args.t, "t")?.scalar()?;
            let y = require(args.y, "y")?;
            if y.is_range() {
                render_curve("y", &y.values(), &manifest, |yy| {
                    transition_kernel(&params, t, yy, sc)
                })
            } else {
                let yy = y.scalar()?;
                let rec = EvalRecord::scalar(
                    args.quantity,
                    inputs(serde_json::json!({"t": t, "y": yy})),
                    transition_kernel(&params, t, yy, sc)?,
                    manifest,
                );
                json_line(&rec)
            }
        }
        Quantity::Green | Quantity::GreenAsymptotic => {
            let x = require(args.x, "x")?.scalar()?;
            let y = require(args.y, "y")?.scalar()?;
            let v = if args.quantity == Quantity::Green {
                green_function(&params, (x, y), sc)?
            } else {
                green_asymptotic(&params, (x, y), sc)?
            };
            let rec = EvalRecord::scalar(
                args.quantity,
                inputs(serde_json::json!({"x": x, "y": y})),
                v,
                manifest,
            );
            json_line(&rec)
        }
        Quantity::BoundaryConstants => {
            let (h0, hpi2) = boundary_asymptotic_constants(&params, sc)?;
            let mut rec =
                EvalRecord::scalar(args.quantity, inputs(serde_json::json!({})), 0.0, manifest);
            rec.value = None;
            rec.h0 = Some(h0);
            rec.h_pi2 = Some(hpi2);
            json_line(&rec)
        }
    }
}

/// Resolved arguments of one `simulate` invocation.
#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub params: ModelParams,
    pub cfg: McConfig,
    pub series: SeriesControl,
    pub quad: QuadControl,
    /// Where to write histogram CSVs; no histograms when absent.
    pub hist_dir: Option<std::path::PathBuf>,
    pub time_bins: Option<BinsArg>,
    pub height_bins: Option<BinsArg>,
}

impl SimulateArgs {
    pub fn new(params: ModelParams, cfg: McConfig) -> Self {
        Self {
            params,
            cfg,
            series: SeriesControl::default(),
            quad: QuadControl::default(),
            hist_dir: None,
            time_bins: None,
            height_bins: None,
        }
    }

    fn canonical_command(&self) -> String {
        let mut cmd = format!(
            "simulate --gamma {} --t0 {} --y0 {} --paths {} --dt {} --horizon {} --seed {}",
            self.params.gamma,
            self.params.t0,
            self.params.y0,
            self.cfg.paths,
            self.cfg.dt,
            self.cfg.horizon,
            self.cfg.seed
        );
        if let Some(dir) = &self.hist_dir {
            cmd.push_str(&format!(" --hist-dir {}", dir.display()));
        }
        if let Some(b) = self.time_bins {
            cmd.push_str(&format!(" --time-bins {b}"));
        }
        if let Some(b) = self.height_bins {
            cmd.push_str(&format!(" --height-bins {b}"));
        }
        cmd
    }

    fn manifest(&self) -> RunManifest {
        RunManifest {
            command: self.canonical_command(),
            params: self.params,
            series: Some(self.series),
            quad: Some(self.quad),
            mc: Some(self.cfg),
            artifact_version: ARTIFACT_VERSION.into(),
            seed: Some(self.cfg.seed),
        }
    }
}

#[derive(Serialize)]
struct SimulateRecord {
    edge1: Estimate,
    edge2: Estimate,
    survived: Estimate,
    warnings: Vec<String>,
    manifest: RunManifest,
}

/// Output of a simulate run: the stdout JSON plus any histogram files.
pub struct SimulateOutput {
    pub stdout: String,
    pub files: Vec<(std::path::PathBuf, String)>,
}

fn histogram_csv(h: &crate::numerics::Histogram, manifest: &RunManifest) -> String {
    let mut out = format!(
        "# manifest {}\nbin_left,bin_right,density,std_error\n",
        serde_json::to_string(manifest).expect("manifest serializes")
    );
    for b in h.bins() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_float(b.left),
            csv_float(b.right),
            csv_float(b.density),
            csv_float(b.std_error)
        ));
    }
    out
}

/// Execute a `simulate` request.
pub fn run_simulate(args: &SimulateArgs) -> Result<SimulateOutput> {
    args.params.validate()?;
    args.cfg.validate()?;
    let manifest = args.manifest();
    let warnings = config_warnings(&args.params, &args.cfg, &args.series, &args.quad)?;

    // One simulation pass serves both the estimates and the histograms.
    let records = simulate_all(&args.params, &args.cfg)?;
    let (e1, e2, surv) = exit_probabilities_from_records(&records);
    let mut files = Vec::new();
    if let Some(dir) = &args.hist_dir {
        // Default bin edges sit half a grid slot off the exit-time lattice
        // {k dt} so edge slots cannot alias into a neighboring bin.
        let horizon_cap = args.cfg.horizon.min(12.0);
        let off = 0.5 * args.cfg.dt;
        let time_spec = args.time_bins.map(|b| b.0).unwrap_or(HistogramSpec {
            lo: -off,
            hi: horizon_cap - off,
            bins: (horizon_cap / 0.05).round() as usize,
        });
        let height_spec = args.height_bins.map(|b| b.0).unwrap_or(HistogramSpec {
            lo: args.params.t0 - off,
            hi: args.params.t0 + 12.0 - off,
            bins: 240,
        });
        let hists =
            histograms_from_records(&records, args.params.t0, time_spec, height_spec, height_spec)?;
        files.push((dir.join("exit_time.csv"), histogram_csv(&hists.exit_time, &manifest)));
        files.push((
            dir.join("exit_height_edge1.csv"),
            histogram_csv(&hists.y_t1, &manifest),
        ));
        files.push((
            dir.join("exit_abscissa_edge2.csv"),
            histogram_csv(&hists.x_t2, &manifest),
        ));
    }

    let record = SimulateRecord {
        edge1: e1,
        edge2: e2,
        survived: surv,
        warnings,
        manifest,
    };
    Ok(SimulateOutput {
        stdout: format!(
            "{}\n",
            serde_json::to_string(&record).map_err(|e| Error::InvalidParams(e.to_string()))?
        ),
        files,
    })
}

/// Resolved arguments of one `validate` invocation.
#[derive(Debug, Clone)]
pub struct ValidateArgs {
    pub params: ModelParams,
    pub level: Level,
    pub series: SeriesControl,
    pub quad: QuadControl,
    pub cfg: McConfig,
}

impl ValidateArgs {
    pub fn new(params: ModelParams, level: Level) -> Self {
        Self {
            params,
            level,
            series: SeriesControl::default(),
            quad: QuadControl::default(),
            cfg: McConfig {
                paths: 1_000_000,
                dt: 1e-3,
                horizon: 40.0,
                seed: 7,
            },
        }
    }

    fn canonical_command(&self) -> String {
        format!(
            "validate --gamma {} --t0 {} --y0 {} --level {} --paths {} --dt {} --horizon {} --seed {}",
            self.params.gamma,
            self.params.t0,
            self.params.y0,
            match self.level {
                Level::Fast => "fast",
                Level::Full => "full",
            },
            self.cfg.paths,
            self.cfg.dt,
            self.cfg.horizon,
            self.cfg.seed
        )
    }
}

#[derive(Serialize)]
struct ValidateRecord {
    #[serde(flatten)]
    report: Report,
    manifest: RunManifest,
}

/// Execute a `validate` request: returns (stdout JSON, human-readable text,
/// overall pass flag).
pub fn run_validate(args: &ValidateArgs) -> Result<(String, String, bool)> {
    let report = run_checks(&args.params, args.level, &args.series, &args.quad, &args.cfg)?;
    let mut human = String::new();
    for c in &report.checks {
        human.push_str(&format!(
            "[{}] criterion {:>2} {:<42} measured {:>12.4e}  tolerance {:>9.3e}{}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.criterion,
            c.name,
            c.measured,
            c.tolerance,
            c.detail
                .as_deref()
                .map(|d| format!("  ({d})"))
                .unwrap_or_default(),
        ));
    }
    human.push_str(&format!(
        "{}: {} of {} checks passed\n",
        if report.passed { "OK" } else { "FAILED" },
        report.checks.iter().filter(|c| c.pass).count(),
        report.checks.len()
    ));
    let passed = report.passed;
    let manifest = RunManifest {
        command: args.canonical_command(),
        params: args.params,
        series: Some(args.series),
        quad: Some(args.quad),
        mc: Some(args.cfg),
        artifact_version: ARTIFACT_VERSION.into(),
        seed: Some(args.cfg.seed),
    };
    let record = ValidateRecord { report, manifest };
    let stdout = format!(
        "{}\n",
        serde_json::to_string_pretty(&record).map_err(|e| Error::InvalidParams(e.to_string()))?
    );
    Ok((stdout, human, passed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_or_range_parsing() {
        assert_eq!("2.5".parse::<ScalarOrRange>().unwrap(), ScalarOrRange::Scalar(2.5));
        let r: ScalarOrRange = "2.0:3.0:0.5".parse().unwrap();
        assert_eq!(r.values(), vec![2.0, 2.5, 3.0]);
        assert!("1:2".parse::<ScalarOrRange>().is_err());
        assert!("2:1:0.5".parse::<ScalarOrRange>().is_err());
        assert!("a".parse::<ScalarOrRange>().is_err());
    }

    #[test]
    fn quantity_round_trips_through_kebab_case() {
        for name in Quantity::ALL {
            let q: Quantity = name.parse().unwrap();
            assert_eq!(q.to_string(), name);
        }
        assert!("bogus".parse::<Quantity>().is_err());
    }

    #[test]
    fn eval_persistence_emits_manifest_and_value() {
        let args = EvalArgs::new(
            Quantity::Persistence,
            ModelParams::new(0.5, 2.0, 1.0).unwrap(),
        );
        let out = run_eval(&args).unwrap();
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert!((v["value"].as_f64().unwrap() - 0.300626).abs() < 1e-6);
        let cmd = v["manifest"]["command"].as_str().unwrap();
        assert!(cmd.starts_with("eval persistence --gamma 0.5 --t0 2 --y0 1"));
    }

    #[test]
    fn eval_range_emits_csv() {
        let mut args = EvalArgs::new(Quantity::F1, ModelParams::new(0.5, 2.0, 1.0).unwrap());
        args.y = Some("2.5:3.0:0.25".parse().unwrap());
        let out = run_eval(&args).unwrap();
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("# manifest "));
        assert_eq!(lines.next().unwrap(), "y,value");
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn eval_domain_violation_is_an_error() {
        let mut args = EvalArgs::new(Quantity::F1, ModelParams::new(0.5, 2.0, 1.0).unwrap());
        args.y = Some(ScalarOrRange::Scalar(1.0));
        assert!(matches!(run_eval(&args).unwrap_err(), Error::Domain(_)));
    }

    #[test]
    fn replaying_the_manifest_command_reproduces_output() {
        let mut args = EvalArgs::new(Quantity::Saddle, ModelParams::new(0.5, 2.0, 1.0).unwrap());
        args.alpha = Some(std::f64::consts::FRAC_PI_4);
        let out = run_eval(&args).unwrap();
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["p"].as_f64().unwrap(), 0.0);
        // The canonical command re-parses to the same arguments, so a second
        // run is byte-identical.
        let again = run_eval(&args).unwrap();
        assert_eq!(out, again);
    }
}
