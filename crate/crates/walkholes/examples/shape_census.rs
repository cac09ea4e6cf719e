//! Census of translation-equivalence classes of holes.
//!
//!     cargo run --release --example shape_census [seed] [steps]

use walkholes::grid::OccupancyGrid;
use walkholes::holes::HoleKind;
use walkholes::spectrum::{shape_census, single_site_lattice_key};
use walkholes::walk::WalkPath;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(5);
    let steps: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(400_000);

    let walk = WalkPath::generate(seed, steps).unwrap();
    let grid = OccupancyGrid::build(&walk).unwrap();
    let census = shape_census(&grid, HoleKind::Lattice);

    let total: u64 = census.values().sum();
    println!("{total} lattice holes across {} distinct shapes", census.len());
    println!(
        "single-site holes: {}",
        census.get(&single_site_lattice_key()).copied().unwrap_or(0)
    );

    let mut by_count: Vec<_> = census.iter().collect();
    by_count.sort_by_key(|(k, &c)| (std::cmp::Reverse(c), k.cells.clone()));
    println!("most common shapes:");
    for (key, count) in by_count.iter().take(6) {
        println!("  x{count}: cells {:?}", key.cells);
    }
}
