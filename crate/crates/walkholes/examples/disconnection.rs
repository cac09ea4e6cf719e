//! Estimate the one- and two-sided disconnection probabilities over a dyadic
//! radius grid and fit the decay exponents.
//!
//!     cargo run --release --example disconnection [trials_per_point]

use walkholes::disconnect::{one_sided_disconnect_prob, two_sided_disconnect_prob};
use walkholes::fit::fit_exponent;

fn main() {
    let trials: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20_000);
    let radii = [16u32, 32, 64, 128, 256];

    let mut one = Vec::new();
    let mut two = Vec::new();
    println!("radius   P(one-sided escape)   P(two-sided escape)   [{trials} trials each]");
    for &r in &radii {
        let a = one_sided_disconnect_prob(r, trials, 1).unwrap();
        let b = two_sided_disconnect_prob(r, true, trials, 2).unwrap();
        let (alo, ahi) = a.wilson_ci();
        let (blo, bhi) = b.wilson_ci();
        println!(
            "{r:>6}   {:.4} [{alo:.4}, {ahi:.4}]   {:.4} [{blo:.4}, {bhi:.4}]",
            a.p_hat(),
            b.p_hat()
        );
        one.push((r as f64, a.p_hat()));
        two.push((r as f64, b.p_hat()));
    }
    let s1 = fit_exponent(&one, None).unwrap();
    let s2 = fit_exponent(&two, None).unwrap();
    println!("one-sided slope {:.3} (theory -1/4)", s1.slope);
    println!("two-sided slope {:.3} (theory -2/3)", s2.slope);
}
