//! The kernel parabola K(p, q) = 0, its branches, and the saddle-point arc
//! that parametrizes all harmonic functions of the killed process.

use brownian_cone::kernel::{
    branch_p, branch_q, comp_point, drift_direction, kernel, saddle_point, BranchSign, Direction,
    ParabolaPoint,
};

fn main() {
    let gamma = 0.5;
    println!("kernel K(p,q) = (p-q)^2/2 + (1-gamma) p + gamma q, gamma = {gamma}\n");

    println!("saddle points (p(alpha), q(alpha)) along the arc:");
    println!("{:>8} {:>12} {:>12} {:>14}", "alpha", "p", "q", "K(p,q)");
    for i in 0..=8 {
        let alpha = std::f64::consts::FRAC_PI_2 * i as f64 / 8.0;
        let s = saddle_point(Direction::new(alpha).unwrap(), gamma);
        println!(
            "{alpha:>8.4} {:>12.6} {:>12.6} {:>14.2e}",
            s.p,
            s.q,
            kernel(s.p, s.q, gamma)
        );
    }

    let drift = drift_direction(gamma);
    println!(
        "\ndrift direction alpha_gamma = atan(gamma/(1-gamma)) = {:.6}; saddle there = {:?}",
        drift.alpha(),
        saddle_point(drift, gamma)
    );

    println!("\nalgebraic branches at q = -1:");
    for sign in [BranchSign::Plus, BranchSign::Minus] {
        let p = branch_p(-1.0, gamma, sign).unwrap();
        println!("  P{sign:?}(-1) = {p:+.6}, K = {:+.2e}", kernel(p, -1.0, gamma));
    }
    println!(
        "  composition Q+(P-(q)) returns q itself: Q+(P-(-1)) = {:+.6}",
        branch_q(branch_p(-1.0, gamma, BranchSign::Minus).unwrap(), gamma, BranchSign::Plus)
            .unwrap()
    );

    println!("\ncompensation sequence from the origin (p0, q0) = (0, 0):");
    println!("{:>4} {:>10} {:>10}", "n", "p_n", "q_n");
    for n in -4..=4 {
        let pt = comp_point(ParabolaPoint::new(0.0, 0.0), gamma, n);
        println!("{n:>4} {:>10.4} {:>10.4}", pt.p, pt.q);
    }
    println!("\nconsecutive points share one coordinate; that alternating walk");
    println!("down the parabola is what cancels the boundary values in turn.");
}
