use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use brownian_cone::cli::{
    run_eval, run_simulate, run_validate, EvalArgs, Quantity, RunManifest, ScalarOrRange,
    SimulateArgs, ValidateArgs,
};
use brownian_cone::error::Error;
use brownian_cone::harmonics::EdgeDirection;
use brownian_cone::kernel::ModelParams;
use brownian_cone::montecarlo::McConfig;
use brownian_cone::numerics::{QuadControl, SeriesControl};
use brownian_cone::validate::Level;

/// Closed-form evaluation and seeded Monte Carlo validation for a drifted
/// Brownian motion killed at the boundary of the cone 0 <= y <= t.
///
/// Data goes to stdout (JSON for scalars, CSV for curves and histograms),
/// diagnostics to stderr. Exit codes: 0 success, 1 check failure,
/// 2 usage or domain error. BROWNIAN_CONE_THREADS caps the worker count.
#[derive(Parser)]
#[command(name = "brownian-cone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one closed-form quantity (JSON; CSV for range arguments).
    Eval(EvalCmd),
    /// Run the Monte Carlo simulator and report exit-probability estimates.
    Simulate(SimulateCmd),
    /// Run the cross-check battery and emit a JSON report.
    Validate(ValidateCmd),
    /// Re-run the command recorded in a manifest JSON file.
    Replay(ReplayCmd),
}

#[derive(Args)]
struct ParamFlags {
    /// Drift of the height process per unit time, in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    gamma: f64,
    /// Apex abscissa of the cone.
    #[arg(long, default_value_t = 2.0)]
    t0: f64,
    /// Starting height, in (0, t0).
    #[arg(long, default_value_t = 1.0)]
    y0: f64,
}

impl ParamFlags {
    fn params(&self) -> ModelParams {
        ModelParams {
            gamma: self.gamma,
            t0: self.t0,
            y0: self.y0,
        }
    }
}

#[derive(Args)]
struct SeriesFlags {
    #[arg(long, default_value_t = 1e-14)]
    series_abs_tol: f64,
    #[arg(long, default_value_t = 200)]
    series_max_terms: usize,
}

impl SeriesFlags {
    fn control(&self) -> SeriesControl {
        SeriesControl {
            abs_tol: self.series_abs_tol,
            max_terms: self.series_max_terms,
        }
    }
}

#[derive(Args)]
struct QuadFlags {
    #[arg(long, default_value_t = 1e-8)]
    quad_rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    quad_abs_tol: f64,
    #[arg(long, default_value_t = 4000)]
    quad_max_subdivisions: usize,
}

impl QuadFlags {
    fn control(&self) -> QuadControl {
        QuadControl {
            rel_tol: self.quad_rel_tol,
            abs_tol: self.quad_abs_tol,
            max_subdivisions: self.quad_max_subdivisions,
        }
    }
}

#[derive(Args)]
struct EvalCmd {
    /// One of: kernel, saddle, comp-seq, harmonic, persistence, exit-prob,
    /// laplace-l1, f1, f2, ft, survival, transition-kernel, green,
    /// green-asymptotic, boundary-constants, conditioned-functional.
    quantity: String,
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    series: SeriesFlags,
    #[command(flatten)]
    quad: QuadFlags,
    /// Direction in [0, pi/2]; defaults to the drift direction where optional.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    /// 1 = moving edge, 2 = fixed edge.
    #[arg(long)]
    edge: Option<u8>,
    /// Arc endpoint for `harmonic`: alpha0 or alpha-pi2.
    #[arg(long)]
    edge_dir: Option<String>,
    /// Scalar or start:end:step sweep.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Index window for comp-seq.
    #[arg(long, default_value_t = -5, allow_negative_numbers = true)]
    n_min: i64,
    #[arg(long, default_value_t = 5, allow_negative_numbers = true)]
    n_max: i64,
}

#[derive(Args)]
struct SimulateCmd {
    #[command(flatten)]
    params: ParamFlags,
    #[arg(long)]
    paths: u64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 40.0)]
    horizon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    series: SeriesFlags,
    #[command(flatten)]
    quad: QuadFlags,
    /// Directory for exit_time.csv, exit_height_edge1.csv,
    /// exit_abscissa_edge2.csv.
    #[arg(long)]
    hist_dir: Option<PathBuf>,
    /// Exit-time bins as lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    time_bins: Option<String>,
    /// Exit-position bins as lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    height_bins: Option<String>,
}

#[derive(Args)]
struct ValidateCmd {
    #[command(flatten)]
    params: ParamFlags,
    /// fast = algebraic/quadrature checks; full adds the Monte Carlo battery.
    #[arg(long, default_value = "fast")]
    level: String,
    #[arg(long, default_value_t = 1_000_000)]
    paths: u64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 40.0)]
    horizon: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    series: SeriesFlags,
    #[command(flatten)]
    quad: QuadFlags,
}

#[derive(Args)]
struct ReplayCmd {
    /// Manifest JSON file produced by a previous run.
    manifest: PathBuf,
}

fn parse_opt_range(s: &Option<String>) -> Result<Option<ScalarOrRange>, Error> {
    s.as_deref().map(str::parse).transpose()
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Eval(cmd) => {
            let quantity: Quantity = cmd.quantity.parse()?;
            let mut args = EvalArgs::new(quantity, cmd.params.params());
            args.series = cmd.series.control();
            args.quad = cmd.quad.control();
            args.alpha = cmd.alpha;
            args.p = cmd.p;
            args.q = cmd.q;
            args.edge = cmd.edge;
            args.edge_dir = match cmd.edge_dir.as_deref() {
                None => None,
                Some("alpha0") => Some(EdgeDirection::Alpha0),
                Some("alpha-pi2") => Some(EdgeDirection::AlphaPi2),
                Some(other) => {
                    return Err(Error::InvalidParams(format!(
                        "edge-dir must be alpha0 or alpha-pi2, got {other}"
                    )))
                }
            };
            args.x = parse_opt_range(&cmd.x)?;
            args.y = parse_opt_range(&cmd.y)?;
            args.t = parse_opt_range(&cmd.t)?;
            args.n_min = cmd.n_min;
            args.n_max = cmd.n_max;
            print!("{}", run_eval(&args)?);
            Ok(0)
        }
        Command::Simulate(cmd) => {
            let cfg = McConfig {
                paths: cmd.paths,
                dt: cmd.dt,
                horizon: cmd.horizon,
                seed: cmd.seed,
            };
            let mut args = SimulateArgs::new(cmd.params.params(), cfg);
            args.series = cmd.series.control();
            args.quad = cmd.quad.control();
            args.hist_dir = cmd.hist_dir;
            args.time_bins = cmd.time_bins.as_deref().map(str::parse).transpose()?;
            args.height_bins = cmd.height_bins.as_deref().map(str::parse).transpose()?;
            let out = run_simulate(&args)?;
            for (path, contents) in &out.files {
                if let Some(dir) = path.parent() {
                    std::fs::create_dir_all(dir)
                        .map_err(|e| Error::InvalidParams(format!("cannot create {dir:?}: {e}")))?;
                }
                std::fs::write(path, contents)
                    .map_err(|e| Error::InvalidParams(format!("cannot write {path:?}: {e}")))?;
            }
            print!("{}", out.stdout);
            Ok(0)
        }
        Command::Validate(cmd) => {
            let level = match cmd.level.as_str() {
                "fast" => Level::Fast,
                "full" => Level::Full,
                other => {
                    return Err(Error::InvalidParams(format!(
                        "level must be fast or full, got {other}"
                    )))
                }
            };
            let mut args = ValidateArgs::new(cmd.params.params(), level);
            args.series = cmd.series.control();
            args.quad = cmd.quad.control();
            args.cfg = McConfig {
                paths: cmd.paths,
                dt: cmd.dt,
                horizon: cmd.horizon,
                seed: cmd.seed,
            };
            let (stdout, human, passed) = run_validate(&args)?;
            eprint!("{human}");
            print!("{stdout}");
            Ok(if passed { 0 } else { 1 })
        }
        Command::Replay(cmd) => {
            let text = std::fs::read_to_string(&cmd.manifest)
                .map_err(|e| Error::InvalidParams(format!("cannot read manifest: {e}")))?;
            let manifest: RunManifest = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidParams(format!("not a manifest: {e}")))?;
            let argv = std::iter::once("brownian-cone")
                .chain(manifest.command.split_whitespace())
                .collect::<Vec<_>>();
            let replayed =
                Cli::try_parse_from(argv).map_err(|e| Error::InvalidParams(e.to_string()))?;
            dispatch(replayed)
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("BROWNIAN_CONE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => {
            let _ = std::io::stdout().flush();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidParams(_) | Error::Domain(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
