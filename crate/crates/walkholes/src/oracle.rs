//! Naive reference implementations used to cross-check the scanline
//! extractors. Everything here is written directly from the definitions with
//! plain breadth-first search over hash sets and shares no code with the
//! production path.

use std::collections::{HashSet, VecDeque};

use crate::walk::{Point, WalkPath};

/// Multiset of hole areas by naive BFS over unvisited lattice sites.
pub fn bfs_lattice_hole_areas(walk: &WalkPath) -> Vec<u64> {
    let visited: HashSet<Point> = walk.positions().iter().copied().collect();
    let (min_x, max_x, min_y, max_y) = bounds(walk);
    let mut seen: HashSet<Point> = HashSet::new();
    let mut areas = Vec::new();
    for y in (min_y - 1)..=(max_y + 1) {
        for x in (min_x - 1)..=(max_x + 1) {
            let start = Point::new(x, y);
            if visited.contains(&start) || seen.contains(&start) {
                continue;
            }
            let mut queue = VecDeque::new();
            let mut cells = Vec::new();
            let mut escaped = false;
            queue.push_back(start);
            seen.insert(start);
            while let Some(p) = queue.pop_front() {
                if p.x < min_x || p.x > max_x || p.y < min_y || p.y > max_y {
                    // The padded ring is unvisited and wraps around the walk,
                    // so touching it means the component reaches infinity.
                    escaped = true;
                }
                cells.push(p);
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let q = Point::new(p.x + dx, p.y + dy);
                    if q.x < min_x - 1 || q.x > max_x + 1 || q.y < min_y - 1 || q.y > max_y + 1 {
                        escaped = true;
                        continue;
                    }
                    if !visited.contains(&q) && seen.insert(q) {
                        queue.push_back(q);
                    }
                }
            }
            if !escaped {
                areas.push(cells.len() as u64);
            }
        }
    }
    areas.sort_unstable();
    areas
}

/// Multiset of hole areas by naive BFS over unit faces; a face is identified
/// by its lower-left corner, and two faces are adjacent when the shared edge
/// was not traversed.
pub fn bfs_planar_hole_areas(walk: &WalkPath) -> Vec<u64> {
    let edges = traversed_edges(walk);
    let (min_x, max_x, min_y, max_y) = bounds(walk);
    // Faces with lower-left corner in [min_x-1, max_x] x [min_y-1, max_y]
    // cover the padded box; anything outside is unbounded sea.
    let mut seen: HashSet<Point> = HashSet::new();
    let mut areas = Vec::new();
    for y in (min_y - 1)..=max_y {
        for x in (min_x - 1)..=max_x {
            let start = Point::new(x, y);
            if seen.contains(&start) {
                continue;
            }
            let mut queue = VecDeque::new();
            let mut count = 0u64;
            let mut escaped = false;
            queue.push_back(start);
            seen.insert(start);
            while let Some(f) = queue.pop_front() {
                count += 1;
                // Right neighbor through the vertical edge at (f.x+1, f.y).
                let moves = [
                    (Point::new(f.x + 1, f.y), (Point::new(f.x + 1, f.y), Point::new(f.x + 1, f.y + 1))),
                    (Point::new(f.x - 1, f.y), (Point::new(f.x, f.y), Point::new(f.x, f.y + 1))),
                    (Point::new(f.x, f.y + 1), (Point::new(f.x, f.y + 1), Point::new(f.x + 1, f.y + 1))),
                    (Point::new(f.x, f.y - 1), (Point::new(f.x, f.y), Point::new(f.x + 1, f.y))),
                ];
                for (g, edge) in moves {
                    if edges.contains(&norm_edge(edge.0, edge.1)) {
                        continue;
                    }
                    if g.x < min_x - 1 || g.x > max_x || g.y < min_y - 1 || g.y > max_y {
                        escaped = true;
                        continue;
                    }
                    if seen.insert(g) {
                        queue.push_back(g);
                    }
                }
            }
            if !escaped {
                areas.push(count);
            }
        }
    }
    areas.sort_unstable();
    areas
}

fn bounds(walk: &WalkPath) -> (i32, i32, i32, i32) {
    let mut min_x = 0;
    let mut max_x = 0;
    let mut min_y = 0;
    let mut max_y = 0;
    for p in walk.positions() {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    (min_x, max_x, min_y, max_y)
}

fn norm_edge(a: Point, b: Point) -> (Point, Point) {
    if (a.x, a.y) <= (b.x, b.y) {
        (a, b)
    } else {
        (b, a)
    }
}

fn traversed_edges(walk: &WalkPath) -> HashSet<(Point, Point)> {
    walk.positions()
        .windows(2)
        .map(|w| norm_edge(w[0], w[1]))
        .collect()
}

/// Outcome of one oracle-vs-scanline comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMismatch {
    pub seed: u64,
    pub step_count: usize,
    pub kind: &'static str,
    pub oracle: Vec<u64>,
    pub actual: Vec<u64>,
}

/// Compare scanline hole areas against BFS on `seeds` walks of lengths
/// spread over `[0, max_steps]`. Returns mismatches (empty = agreement).
pub fn equivalence_sweep(max_steps: usize, seeds: u64) -> Vec<OracleMismatch> {
    use crate::grid::OccupancyGrid;
    use crate::holes::{lattice_holes, planar_holes};
    use rayon::prelude::*;

    (0..seeds)
        .into_par_iter()
        .flat_map(|seed| {
            // Deterministic spread of lengths including the degenerate ones.
            let step_count = if seed < 8 {
                seed as usize
            } else {
                (seed as usize * 7919) % (max_steps + 1)
            };
            let walk = WalkPath::generate(seed, step_count).expect("within budget");
            let grid = OccupancyGrid::build(&walk).expect("within budget");
            let mut mismatches = Vec::new();
            let mut lat: Vec<u64> = lattice_holes(&grid).iter().map(|h| h.area).collect();
            lat.sort_unstable();
            let lat_oracle = bfs_lattice_hole_areas(&walk);
            if lat != lat_oracle {
                mismatches.push(OracleMismatch {
                    seed,
                    step_count,
                    kind: "lattice",
                    oracle: lat_oracle,
                    actual: lat,
                });
            }
            let mut pla: Vec<u64> = planar_holes(&grid).iter().map(|h| h.area).collect();
            pla.sort_unstable();
            let pla_oracle = bfs_planar_hole_areas(&walk);
            if pla != pla_oracle {
                mismatches.push(OracleMismatch {
                    seed,
                    step_count,
                    kind: "planar",
                    oracle: pla_oracle,
                    actual: pla,
                });
            }
            mismatches
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::Direction::*;

    #[test]
    fn oracle_matches_hand_counts() {
        let unit = WalkPath::from_steps(0, vec![East, North, West, South]);
        assert_eq!(bfs_planar_hole_areas(&unit), vec![1]);
        assert!(bfs_lattice_hole_areas(&unit).is_empty());

        let square = WalkPath::from_steps(
            0,
            vec![East, East, North, North, West, West, South, South],
        );
        assert_eq!(bfs_planar_hole_areas(&square), vec![4]);
        assert_eq!(bfs_lattice_hole_areas(&square), vec![1]);
    }

    #[test]
    fn quick_equivalence_sweep() {
        let mismatches = equivalence_sweep(200, 120);
        assert!(mismatches.is_empty(), "{mismatches:?}");
    }
}
