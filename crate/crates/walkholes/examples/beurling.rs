//! Beurling escape probabilities past a lattice half-line, with the
//! square-root exponent fit.
//!
//!     cargo run --release --example beurling [trials_per_point]

use walkholes::disconnect::beurling_prob;
use walkholes::fit::fit_exponent;
use walkholes::walk::Point;

fn main() {
    let trials: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20_000);
    let n = 512u32;
    let mut points = Vec::new();
    println!("|x|    P(exit D({n}) before hitting the half-line)");
    for k in [1i32, 2, 4, 8, 16, 32, 64] {
        let s = beurling_prob(Point::new(0, k), n, trials, 4).unwrap();
        let (lo, hi) = s.wilson_ci();
        println!("{k:>4}   {:.4} [{lo:.4}, {hi:.4}]", s.p_hat());
        points.push((k as f64, s.p_hat()));
    }
    let est = fit_exponent(&points, None).unwrap();
    println!("slope of log p vs log |x|: {:.3} (theory 1/2)", est.slope);
}
