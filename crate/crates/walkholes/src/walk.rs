//! Planar simple random walk generation and elementary path statistics.
//!
//! A walk is reproduced exactly from `(seed, step_count)`: directions are the
//! two low bits of successive xoshiro256** outputs (0 = E, 1 = N, 2 = W,
//! 3 = S), with the generator seeded through SplitMix64. The continuous,
//! linearly interpolated path is represented implicitly by the set of
//! traversed unit edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Xoshiro256;

/// Memory guard for walk generation: steps plus positions for the default
/// budget stay under ~1.3 GiB.
pub const DEFAULT_STEP_BUDGET: usize = 1 << 27;

/// Lattice point with 32-bit coordinates; desk-scale walks never leave
/// the ±2^31 box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub fn new(x: i32, y: i32) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        let x = self.x as f64;
        let y = self.y as f64;
        x * x + y * y
    }
}

/// Closed integer rectangle `[min_x, max_x] x [min_y, max_y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub min_x: i32,
    pub min_y: i32,
    pub max_x: i32,
    pub max_y: i32,
}

impl Rect {
    pub fn width(&self) -> i64 {
        self.max_x as i64 - self.min_x as i64 + 1
    }

    pub fn height(&self) -> i64 {
        self.max_y as i64 - self.min_y as i64 + 1
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    /// Grow by `pad` on every side.
    pub fn padded(&self, pad: i32) -> Rect {
        Rect {
            min_x: self.min_x - pad,
            min_y: self.min_y - pad,
            max_x: self.max_x + pad,
            max_y: self.max_y + pad,
        }
    }
}

/// One of the four lattice directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum Direction {
    East = 0,
    North = 1,
    West = 2,
    South = 3,
}

impl Direction {
    /// Decode the two low bits of a generator draw.
    #[inline]
    pub fn from_bits(bits: u64) -> Direction {
        match bits & 3 {
            0 => Direction::East,
            1 => Direction::North,
            2 => Direction::West,
            _ => Direction::South,
        }
    }

    #[inline]
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::East => (1, 0),
            Direction::North => (0, 1),
            Direction::West => (-1, 0),
            Direction::South => (0, -1),
        }
    }
}

/// A seeded planar simple random walk: step codes plus derived positions.
#[derive(Debug, Clone)]
pub struct WalkPath {
    seed: u64,
    steps: Vec<Direction>,
    positions: Vec<Point>,
}

impl WalkPath {
    /// Generate `step_count` uniform steps from `seed`. The result is a pure
    /// function of its arguments.
    pub fn generate(seed: u64, step_count: usize) -> Result<WalkPath> {
        Self::generate_with_budget(seed, step_count, DEFAULT_STEP_BUDGET)
    }

    pub fn generate_with_budget(seed: u64, step_count: usize, budget: usize) -> Result<WalkPath> {
        if step_count > budget {
            return Err(Error::Resource {
                what: "walk steps",
                requested: step_count as u64,
                budget: budget as u64,
            });
        }
        let mut rng = Xoshiro256::seed_from(seed);
        let mut steps = Vec::with_capacity(step_count);
        let mut positions = Vec::with_capacity(step_count + 1);
        let mut pos = Point::ORIGIN;
        positions.push(pos);
        for _ in 0..step_count {
            let dir = Direction::from_bits(rng.next_u64());
            let (dx, dy) = dir.delta();
            pos = Point::new(pos.x + dx, pos.y + dy);
            steps.push(dir);
            positions.push(pos);
        }
        Ok(WalkPath {
            seed,
            steps,
            positions,
        })
    }

    /// Build a walk from explicit steps (fixtures, embedded walks).
    pub fn from_steps(seed: u64, steps: Vec<Direction>) -> WalkPath {
        let mut positions = Vec::with_capacity(steps.len() + 1);
        let mut pos = Point::ORIGIN;
        positions.push(pos);
        for &dir in &steps {
            let (dx, dy) = dir.delta();
            pos = Point::new(pos.x + dx, pos.y + dy);
            positions.push(pos);
        }
        WalkPath {
            seed,
            steps,
            positions,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[Direction] {
        &self.steps
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, k: usize) -> Point {
        self.positions[k]
    }

    /// Full scan of the unit L1-step property.
    pub fn is_valid(&self) -> bool {
        if self.positions.len() != self.steps.len() + 1 {
            return false;
        }
        if self.positions[0] != Point::ORIGIN {
            return false;
        }
        self.positions.windows(2).all(|w| {
            let dx = (w[1].x - w[0].x).abs();
            let dy = (w[1].y - w[0].y).abs();
            dx + dy == 1
        })
    }
}

/// Extremal statistics of a walk's visited set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeStats {
    /// Max Euclidean norm over visited sites.
    pub max_radius: f64,
    /// Tight bounding box of visited sites.
    pub bbox: Rect,
}

/// Range statistics straight off the generator, without materializing the
/// walk. Agrees with `range_stats(WalkPath::generate(seed, step_count))`.
pub fn streamed_range(seed: u64, step_count: usize) -> RangeStats {
    let mut rng = Xoshiro256::seed_from(seed);
    let mut pos = Point::ORIGIN;
    let mut max_norm2: i64 = 0;
    let mut bbox = Rect {
        min_x: 0,
        min_y: 0,
        max_x: 0,
        max_y: 0,
    };
    for _ in 0..step_count {
        let (dx, dy) = Direction::from_bits(rng.next_u64()).delta();
        pos.x += dx;
        pos.y += dy;
        let n2 = pos.x as i64 * pos.x as i64 + pos.y as i64 * pos.y as i64;
        if n2 > max_norm2 {
            max_norm2 = n2;
        }
        bbox.min_x = bbox.min_x.min(pos.x);
        bbox.max_x = bbox.max_x.max(pos.x);
        bbox.min_y = bbox.min_y.min(pos.y);
        bbox.max_y = bbox.max_y.max(pos.y);
    }
    RangeStats {
        max_radius: (max_norm2 as f64).sqrt(),
        bbox,
    }
}

/// Max radius and tight bounding box of the visited sites.
pub fn range_stats(walk: &WalkPath) -> RangeStats {
    let mut max_norm2: i64 = 0;
    let mut bbox = Rect {
        min_x: 0,
        min_y: 0,
        max_x: 0,
        max_y: 0,
    };
    for &p in walk.positions() {
        let n2 = p.x as i64 * p.x as i64 + p.y as i64 * p.y as i64;
        if n2 > max_norm2 {
            max_norm2 = n2;
        }
        bbox.min_x = bbox.min_x.min(p.x);
        bbox.max_x = bbox.max_x.max(p.x);
        bbox.min_y = bbox.min_y.min(p.y);
        bbox.max_y = bbox.max_y.max(p.y);
    }
    RangeStats {
        max_radius: (max_norm2 as f64).sqrt(),
        bbox,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::split_seed;

    #[test]
    fn empty_walk() {
        let w = WalkPath::generate(5, 0).unwrap();
        assert_eq!(w.positions(), &[Point::ORIGIN]);
        assert!(w.steps().is_empty());
        assert!(w.is_valid());
    }

    #[test]
    fn seed_42_eight_steps_fixture() {
        // Frozen once from the documented generator (xoshiro256** low bits).
        use Direction::*;
        let w = WalkPath::generate(42, 8).unwrap();
        assert_eq!(w.steps(), &[West, West, North, North, East, East, West, South]);
        assert_eq!(w.position(8), Point::new(-1, 1));
        assert!(w.is_valid());
    }

    #[test]
    fn regeneration_is_identical() {
        let a = WalkPath::generate(987, 5000).unwrap();
        let b = WalkPath::generate(987, 5000).unwrap();
        assert_eq!(a.positions(), b.positions());
    }

    #[test]
    fn prefix_consistency() {
        let long = WalkPath::generate(11, 4000).unwrap();
        let short = WalkPath::generate(11, 1500).unwrap();
        assert_eq!(&long.positions()[..1501], short.positions());
    }

    #[test]
    fn step_frequencies_are_fair() {
        // Each direction within 4 sigma of 1/4 under a binomial model.
        let n = 1_000_000usize;
        let w = WalkPath::generate(2024, n).unwrap();
        let mut counts = [0i64; 4];
        for &s in w.steps() {
            counts[s as usize] += 1;
        }
        let expect = n as f64 / 4.0;
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for &c in &counts {
            assert!(
                (c as f64 - expect).abs() < 4.0 * sigma,
                "direction counts {counts:?}"
            );
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = WalkPath::generate_with_budget(1, 1001, 1000).unwrap_err();
        assert!(matches!(err, crate::error::Error::Resource { .. }));
    }

    #[test]
    fn streamed_range_matches_materialized() {
        for seed in 0..20u64 {
            let w = WalkPath::generate(seed, 700).unwrap();
            assert_eq!(streamed_range(seed, 700), range_stats(&w));
        }
    }

    #[test]
    fn straight_path_range() {
        use Direction::East;
        let w = WalkPath::from_steps(0, vec![East, East, East, East]);
        let rs = range_stats(&w);
        assert_eq!(rs.max_radius, 4.0);
        assert_eq!(
            rs.bbox,
            Rect {
                min_x: 0,
                min_y: 0,
                max_x: 4,
                max_y: 0
            }
        );
    }

    #[test]
    fn replica_seeds_differ() {
        let master = 7;
        let w0 = WalkPath::generate(split_seed(master, 0), 64).unwrap();
        let w1 = WalkPath::generate(split_seed(master, 1), 64).unwrap();
        assert_ne!(w0.positions(), w1.positions());
    }
}
