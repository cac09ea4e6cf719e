//! Couple a Brownian path with a Skorokhod-embedded walk and measure how
//! closely they track each other.
//!
//!     cargo run --release --example coupling_trace [seed] [n]

use walkholes::coupling::{embed_walk, sup_distance};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let n: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(10_000);
    let dt = 1.0 / 64.0;

    let trace = embed_walk(seed, n, dt).unwrap();
    let sup = sup_distance(&trace);
    let bound = (n as f64).powf(0.25) * (n as f64).ln().powi(2);

    println!("embedded walk: {} steps, valid = {}", trace.walk().step_count(), trace.walk().is_valid());
    println!("last embedding time tau[2n] = {:.1} (Brownian horizon n = {n})", trace.tau().last().unwrap());
    println!("sup |B(t) - S(2t)| = {sup:.2}");
    println!("n^(1/4) ln^2 n     = {bound:.2}  (within: {})", sup <= bound);

    // Alignment snapshot at a few embedding times.
    for &k in &[1usize, n as usize / 2, 2 * n as usize] {
        let t = trace.tau()[k];
        let (bx, by) = trace.bm_at(t);
        let p = trace.walk().position(k);
        let d = ((bx - p.x as f64).powi(2) + (by - p.y as f64).powi(2)).sqrt();
        println!("  step {k:>6} at t = {t:>9.2}: |B - S| = {d:.2}");
    }
}
