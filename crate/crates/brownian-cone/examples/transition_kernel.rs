//! The killed transition kernel: image series, mass against survival,
//! Chapman-Kolmogorov composition, and the independent convolution route.

use brownian_cone::densities::{
    free_kernel, kernel_via_convolution, survival_probability, transition_kernel,
};
use brownian_cone::kernel::ModelParams;
use brownian_cone::numerics::{integrate, QuadControl, SeriesControl};

fn main() {
    let params = ModelParams::new(0.5, 2.0, 1.0).unwrap();
    let sc = SeriesControl::default();
    let qc = QuadControl::default();
    let t = 1.0;

    println!("killed kernel slice at t = {t} (cone is 0 <= y <= {}):", params.t0 + t);
    println!("{:>6} {:>12} {:>12} {:>14}", "y", "killed", "free", "convolution");
    for i in 0..=10 {
        let y = (params.t0 + t) * i as f64 / 10.0;
        let k = transition_kernel(&params, t, y, &sc).unwrap();
        let free = free_kernel(&params, t, y);
        let conv = kernel_via_convolution(&params, t, y, &sc, &qc).unwrap();
        println!("{y:>6.2} {k:>12.6} {free:>12.6} {conv:>14.6}");
    }

    let mass = integrate(
        |y| transition_kernel(&params, t, y.clamp(0.0, params.t0 + t), &sc).unwrap(),
        0.0,
        params.t0 + t,
        &qc,
    )
    .unwrap();
    let survival = survival_probability(&params, t, &sc, &qc).unwrap();
    println!("\nkernel mass     = {:.12}", mass.value);
    println!("P(T > {t})       = {survival:.12}");

    // Chapman-Kolmogorov: restart the process from the slice at s = 0.5.
    let (s, rest) = (0.5, 0.5);
    let y_target = 1.5;
    let lhs = transition_kernel(&params, s + rest, y_target, &sc).unwrap();
    let rhs = integrate(
        |u| {
            let uu = u.clamp(0.0, params.t0 + s);
            let first = transition_kernel(&params, s, uu, &sc).unwrap();
            if first == 0.0 {
                return 0.0;
            }
            let from_u = ModelParams {
                gamma: params.gamma,
                t0: params.t0 + s,
                y0: uu,
            };
            first * transition_kernel(&from_u, rest, y_target, &sc).unwrap()
        },
        0.0,
        params.t0 + s,
        &qc,
    )
    .unwrap();
    println!("\nChapman-Kolmogorov at y = {y_target}:");
    println!("  direct kernel      = {lhs:.12}");
    println!("  composed over slice = {:.12}", rhs.value);
}
