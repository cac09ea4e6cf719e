//! Generate a seeded walk and print its elementary statistics.
//!
//!     cargo run --release --example generate_walk [seed] [steps]

use walkholes::walk::{range_stats, WalkPath};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(42);
    let steps: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100_000);

    let walk = WalkPath::generate(seed, steps).expect("within budget");
    let rs = range_stats(&walk);
    println!("seed {seed}, {steps} steps");
    println!("  end position   {:?}", walk.position(steps));
    println!("  max radius     {:.2}", rs.max_radius);
    println!(
        "  bounding box   [{}, {}] x [{}, {}]",
        rs.bbox.min_x, rs.bbox.max_x, rs.bbox.min_y, rs.bbox.max_y
    );
    println!("  valid L1 path  {}", walk.is_valid());

    // Regeneration is byte-identical: same seed, same walk.
    let again = WalkPath::generate(seed, steps).unwrap();
    assert_eq!(walk.positions(), again.positions());
    println!("  reproducible   true");
}
