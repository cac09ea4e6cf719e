//! Rasterize the coupled Brownian path, count its holes, and print the
//! normalized counts drifting toward 2*pi, plus one delta comparison.
//!
//!     cargo run --release --example brownian_holes [seed] [n]

use walkholes::coupling::{bm_holes, delta_area, embed_walk};
use walkholes::grid::OccupancyGrid;
use walkholes::holes::planar_holes;
use walkholes::walk::Point;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let n: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let h = 0.5;

    let trace = embed_walk(seed, n, 1.0 / 64.0).unwrap();
    let holes = bm_holes(&trace, h).unwrap();
    println!("{} Brownian raster holes at h = {h}", holes.len());
    for vf in [0.1, 0.01, 0.001] {
        let u = vf * n as f64;
        let count = holes.iter().filter(|r| r.area >= u).count();
        let ratio = vf * f64::ln(vf).powi(2) * count as f64;
        println!(
            "  area >= {u:>8.1}: {count:>4} holes, (u/n) ln^2(u/n) N = {ratio:.3}  (limit 2*pi = {:.3})",
            std::f64::consts::TAU
        );
    }

    // Compare the Brownian and walk hole containing one interior point of
    // the walk's largest hole.
    let grid = OccupancyGrid::build(trace.walk()).unwrap();
    let mut walk_holes = planar_holes(&grid);
    walk_holes.sort_by_key(|r| std::cmp::Reverse(r.area));
    if let Some(big) = walk_holes.first() {
        let mut z = big.representative;
        for y in big.bbox.min_y..=big.bbox.max_y {
            for x in big.bbox.min_x..=big.bbox.max_x {
                let p = Point::new(x, y);
                if let Some((gx, gy)) = grid.to_grid(p) {
                    if !grid.is_visited(gx, gy) {
                        z = p;
                    }
                }
            }
        }
        let d = delta_area(&trace, z, h).unwrap();
        println!(
            "delta at {z:?}: walk hole {:?}, Brownian hole {:?}, delta {:?}",
            d.walk_area, d.bm_area, d.delta
        );
    }
}
