//! The compensation-series harmonic functions: interior directions, the two
//! degenerate edge functions, harmonicity residuals, and the normalized
//! Martin kernel h^alpha(z0) / h^alpha(1, 1).

use brownian_cone::harmonics::{h_edge, h_interior, EdgeDirection};
use brownian_cone::kernel::{saddle_point, Direction};
use brownian_cone::numerics::{apply_generator, FdStencil, SeriesControl};

fn main() {
    let gamma = 0.5;
    let ctrl = SeriesControl::default();
    let z0 = (1.0, 1.0);

    println!("interior harmonic functions h^alpha at z0 = {z0:?}, gamma = {gamma}:");
    println!(
        "{:>8} {:>14} {:>8} {:>12} {:>16}",
        "alpha", "h(z0)", "terms", "|Gh|/h", "h(z0)/h(1,1)"
    );
    for i in 1..8 {
        let alpha = std::f64::consts::FRAC_PI_2 * i as f64 / 8.0;
        let origin = saddle_point(Direction::new(alpha).unwrap(), gamma);
        let h = h_interior(z0, origin, gamma, &ctrl).unwrap();
        let hf = |x: f64, y: f64| h_interior((x, y), origin, gamma, &ctrl).unwrap().value;
        let resid = apply_generator(hf, gamma, 1.5, 1.5, FdStencil::new(1e-3)).abs() / hf(1.5, 1.5);
        // z0 = (1,1) makes the Martin normalization trivial; evaluate at
        // another point to show a nontrivial kernel value.
        let at_2_1 = h_interior((2.0, 1.0), origin, gamma, &ctrl).unwrap().value;
        println!(
            "{alpha:>8.4} {:>14.8} {:>8} {:>12.2e} {:>16.8}",
            h.value,
            h.terms_used,
            resid,
            at_2_1 / h.value
        );
    }

    println!("\nedge harmonic functions (arc endpoints carry linear prefactors):");
    for which in [EdgeDirection::Alpha0, EdgeDirection::AlphaPi2] {
        let h = h_edge(z0, which, gamma, &ctrl).unwrap();
        let hf = |x: f64, y: f64| h_edge((x, y), which, gamma, &ctrl).unwrap().value;
        let resid = apply_generator(hf, gamma, 1.5, 1.5, FdStencil::new(1e-3)).abs() / hf(1.5, 1.5);
        println!("  {which:?}: h(z0) = {:.12}, |Gh|/h = {resid:.2e}", h.value);
    }

    println!("\nboundary values (all vanish):");
    let origin = saddle_point(Direction::new(0.9).unwrap(), gamma);
    for z in [(0.0, 2.0), (3.0, 0.0)] {
        println!(
            "  h_interior{z:?} = {:.2e}, h_edge{z:?} = {:.2e}",
            h_interior(z, origin, gamma, &ctrl).unwrap().value,
            h_edge(z, EdgeDirection::Alpha0, gamma, &ctrl).unwrap().value
        );
    }
}
