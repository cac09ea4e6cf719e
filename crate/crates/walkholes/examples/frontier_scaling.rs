//! Boundary-square counts of the outer frontier across walk sizes and the
//! 2/3 scaling fit.
//!
//!     cargo run --release --example frontier_scaling [replicas]

use rayon::prelude::*;
use walkholes::fit::fit_exponent;
use walkholes::grid::OccupancyGrid;
use walkholes::holes::{boundary_squares, planar_holes, FrontierScope};
use walkholes::rng::split_seed;
use walkholes::walk::WalkPath;

fn main() {
    let replicas: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(12);
    let mut points = Vec::new();
    for n in [10_000u64, 100_000, 1_000_000] {
        let total: f64 = (0..replicas)
            .into_par_iter()
            .map(|rep| {
                let walk = WalkPath::generate(split_seed(43, n ^ rep), 2 * n as usize).unwrap();
                let grid = OccupancyGrid::build(&walk).unwrap();
                let holes = planar_holes(&grid);
                // min_area above every hole isolates the outer frontier.
                boundary_squares(&grid, &holes, u64::MAX, FrontierScope::HolesAndOuter).count
                    as f64
            })
            .sum();
        let mean = total / replicas as f64;
        println!("n = {n:>8}: mean outer-frontier squares {mean:.0}");
        points.push((n as f64, mean));
    }
    let est = fit_exponent(&points, None).unwrap();
    println!("slope {:.3} (frontier dimension scaling: 2/3)", est.slope);
}
