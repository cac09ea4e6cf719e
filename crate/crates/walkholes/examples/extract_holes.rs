//! Extract lattice and planar holes of one walk and show the largest ones,
//! the face partition, and a first-enclosure time.
//!
//!     cargo run --release --example extract_holes [seed] [steps]

use walkholes::grid::OccupancyGrid;
use walkholes::holes::{
    first_enclosure_time, lattice_holes, planar_holes, unbounded_component, HoleKind,
};
use walkholes::walk::WalkPath;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);
    let steps: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(200_000);

    let walk = WalkPath::generate(seed, steps).expect("within budget");
    let grid = OccupancyGrid::build(&walk).expect("within budget");

    let mut lat = lattice_holes(&grid);
    let mut pla = planar_holes(&grid);
    lat.sort_by_key(|h| std::cmp::Reverse(h.area));
    pla.sort_by_key(|h| std::cmp::Reverse(h.area));

    println!("{} lattice holes, {} planar holes", lat.len(), pla.len());
    for h in pla.iter().take(5) {
        println!(
            "  planar hole: area {:>6}, representative face at {:?}",
            h.area, h.representative
        );
    }

    // Faces partition exactly into holes plus the unbounded sea.
    let sea = unbounded_component(&grid).face_count();
    let hole_faces: u64 = pla.iter().map(|h| h.area).sum();
    assert_eq!(sea + hole_faces, grid.total_faces());
    println!(
        "face partition: {} hole faces + {} unbounded = {} total",
        hole_faces,
        sea,
        grid.total_faces()
    );

    if let Some(big) = pla.first() {
        if let Some(z) = interior_site(&grid, big) {
            let t_lat = first_enclosure_time(&walk, z, HoleKind::Lattice);
            let t_pla = first_enclosure_time(&walk, z, HoleKind::Planar);
            println!(
                "largest hole's point {z:?}: enclosed (lattice) at {t_lat:?}, (planar) at {t_pla:?}"
            );
        }
    }
}

/// An unvisited site whose faces belong to this hole's component.
fn interior_site(
    grid: &OccupancyGrid,
    hole: &walkholes::holes::HoleRecord,
) -> Option<walkholes::walk::Point> {
    use walkholes::holes::{CellComponent, PlanarComponents};
    let mut comps = PlanarComponents::extract(grid);
    for y in hole.bbox.min_y..=hole.bbox.max_y {
        for x in hole.bbox.min_x..=hole.bbox.max_x {
            let p = walkholes::walk::Point::new(x, y);
            let Some((gx, gy)) = grid.to_grid(p) else { continue };
            if grid.is_visited(gx, gy) {
                continue;
            }
            if let CellComponent::Hole(i) = comps.face_component(gx - 1, gy - 1) {
                if comps.holes()[i].area == hole.area {
                    return Some(p);
                }
            }
        }
    }
    None
}
