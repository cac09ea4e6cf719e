//! Build a hole-area spectrum, bin it geometrically, and print the
//! normalized threshold count next to its 2*pi prediction.
//!
//!     cargo run --release --example hole_spectrum [n] [replicas]

use walkholes::grid::OccupancyGrid;
use walkholes::holes::{planar_holes, HoleKind};
use walkholes::rng::split_seed;
use walkholes::spectrum::{bin_counts, normalized_count, HoleSpectrum};
use walkholes::walk::WalkPath;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(100_000);
    let replicas: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let delta = 0.4;
    let eps = 0.5;

    let mut ratio_sum = 0.0;
    for rep in 0..replicas {
        let walk = WalkPath::generate(split_seed(7, rep), 2 * n as usize).unwrap();
        let grid = OccupancyGrid::build(&walk).unwrap();
        let spec = HoleSpectrum::from_holes(n, HoleKind::Planar, &planar_holes(&grid), rep);
        let nc = normalized_count(&spec, delta).unwrap();
        ratio_sum += nc.ratio;
        if rep == 0 {
            println!("replica 0: {} holes total", spec.total_holes());
            println!(
                "threshold n^(1-delta) = {:.1}: {} holes, gamma = {:.2}, ratio = {:.3}",
                (n as f64).powf(1.0 - delta),
                nc.raw,
                nc.gamma,
                nc.ratio
            );
            println!("geometric bins (c = {}):", 1.0 + eps);
            for b in bin_counts(&spec, delta, eps).unwrap().iter().take(8) {
                println!("  [{:9.1}, {:9.1})  {}", b.lo, b.hi, b.count);
            }
        }
    }
    println!(
        "mean normalized ratio over {replicas} replicas: {:.3}  (2*pi = {:.3}; the approach is log-slow)",
        ratio_sum / replicas as f64,
        std::f64::consts::TAU
    );
}
