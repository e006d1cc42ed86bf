//! Exit densities on the two edges, the exit-time density, and their mass
//! identities against the series probabilities.

use brownian_cone::densities::{exit_density_f1, exit_density_f2, exit_time_density};
use brownian_cone::harmonics::{exit_probability, persistence_probability, Edge};
use brownian_cone::kernel::ModelParams;
use brownian_cone::numerics::{integrate, QuadControl, SeriesControl};

fn main() {
    let params = ModelParams::new(0.5, 2.0, 1.0).unwrap();
    let sc = SeriesControl::default();
    let qc = QuadControl::default();

    println!("exit-time density f_T and edge densities at gamma=0.5, t0=2, y0=1:");
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "f1(t0+t)", "f2(t0+t)", "f_T(t)");
    let mut t = 0.25;
    while t <= 4.0 {
        let f1 = exit_density_f1(&params, params.t0 + t, &sc).unwrap();
        let f2 = exit_density_f2(&params, params.t0 + t, &sc).unwrap();
        let ft = exit_time_density(&params, t, &sc).unwrap();
        println!("{t:>6.2} {f1:>12.6} {f2:>12.6} {ft:>12.6}");
        t += 0.25;
    }

    // Mass over a finite window plus the analytic tail accounts for the
    // full exit probability.
    let window = integrate(
        |t| exit_time_density(&params, t.max(1e-12), &sc).unwrap_or(0.0),
        0.0,
        60.0,
        &qc,
    )
    .unwrap();
    let escape = 1.0 - persistence_probability(&params, &sc).unwrap();
    println!("\nintegral of f_T over (0, 60)   = {:.12}", window.value);
    println!("1 - P(T = inf)                 = {escape:.12}");
    println!(
        "difference (tail beyond t = 60) = {:.2e}",
        escape - window.value
    );
    println!(
        "\nP(exit on moving edge) = {:.12} (f1 mass)",
        exit_probability(&params, Edge::One, &sc).unwrap()
    );
    println!(
        "P(exit on fixed edge)  = {:.12} (f2 mass)",
        exit_probability(&params, Edge::Two, &sc).unwrap()
    );
}
