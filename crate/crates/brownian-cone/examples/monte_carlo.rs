//! Monte Carlo cross-validation in miniature: a seeded 100k-path run
//! against the closed forms (the full battery is `brownian-cone validate
//! --level full`).

use brownian_cone::densities::conditioned_functional_horizon_tail;
use brownian_cone::harmonics::{
    conditioned_exit_functional, exit_probability, persistence_probability, Edge,
};
use brownian_cone::kernel::{saddle_point, Direction, ModelParams};
use brownian_cone::montecarlo::{
    conditioned_functional_from_records, config_warnings, exit_probabilities_from_records,
    simulate_all, McConfig,
};
use brownian_cone::numerics::{QuadControl, SeriesControl};

fn main() {
    let params = ModelParams::new(0.5, 2.0, 1.0).unwrap();
    let cfg = McConfig {
        paths: 100_000,
        dt: 1e-3,
        horizon: 40.0,
        seed: 7,
    };
    let sc = SeriesControl::default();
    let qc = QuadControl::default();

    for w in config_warnings(&params, &cfg, &sc, &qc).unwrap() {
        println!("warning: {w}");
    }

    println!("simulating {} paths (dt = {}, horizon = {}, seed = {})...", cfg.paths, cfg.dt, cfg.horizon, cfg.seed);
    let records = simulate_all(&params, &cfg).unwrap();
    let (e1, e2, surv) = exit_probabilities_from_records(&records);

    println!("\n{:<28} {:>12} {:>12} {:>8}", "quantity", "monte carlo", "series", "sigmas");
    let rows = [
        ("P(exit on moving edge)", e1, exit_probability(&params, Edge::One, &sc).unwrap()),
        ("P(exit on fixed edge)", e2, exit_probability(&params, Edge::Two, &sc).unwrap()),
        ("P(T = infinity)", surv, persistence_probability(&params, &sc).unwrap()),
    ];
    for (name, est, exact) in rows {
        println!(
            "{name:<28} {:>12.6} {exact:>12.6} {:>+8.2}",
            est.value,
            (est.value - exact) / est.std_error
        );
    }

    println!("\nconditioned exit functional E(exp(X_T p + Y_T q); T < inf):");
    for alpha in [0.4, std::f64::consts::FRAC_PI_4, 1.1] {
        let pt = saddle_point(Direction::new(alpha).unwrap(), params.gamma);
        let est = conditioned_functional_from_records(pt, params.t0, &records);
        let exact = conditioned_exit_functional(&params, pt, &sc).unwrap();
        let tail = conditioned_functional_horizon_tail(&params, pt, cfg.horizon, &sc, &qc).unwrap();
        println!(
            "  alpha = {alpha:.4}: estimate {:.6} +- {:.1e}, series {:.6} (horizon tail {:.1e})",
            est.value,
            est.std_error,
            exact - tail,
            tail
        );
    }
}
