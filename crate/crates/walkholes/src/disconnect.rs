//! Monte Carlo estimators for the one- and two-sided disconnection
//! probabilities and the Beurling hitting probability.
//!
//! Success means the start keeps planar contact with infinity: at least one
//! of the origin's four incident faces connects to the unbounded face
//! component of the trial paths' complement (for Beurling, success is exit
//! before hitting the obstacle). Trials are deterministic: trial `t` of an
//! estimator keyed by `param` uses `split_seed(split_seed(seed, param), t)`.
//!
//! The escape test runs on reusable epoch-stamped scratch grids; the search
//! pops faces farthest from the origin first, so escaping trials head
//! straight for the border instead of flooding the whole complement.

use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{split_seed, Xoshiro256};
use crate::walk::{Direction, Point};

/// Which disconnection event a sample estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisconnectVariant {
    /// One walk run to first exit of `D(radius)`.
    OneSidedRadius,
    /// Two walks of `param` steps each.
    TwoSidedTime,
    /// Two walks, each to its own exit of `D(param)`.
    TwoSidedRadius,
    /// Escape past radius `n` before hitting the half-line obstacle.
    Beurling,
}

/// Tally of one estimator grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisconnectSample {
    pub variant: DisconnectVariant,
    pub radius_or_time: u64,
    pub trials: u64,
    pub successes: u64,
}

impl DisconnectSample {
    pub fn p_hat(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn wilson_ci(&self) -> (f64, f64) {
        crate::fit::wilson_interval(self.successes, self.trials)
    }

    /// Exact merge of disjoint trial batches.
    pub fn merge(&self, other: &DisconnectSample) -> Result<DisconnectSample> {
        if self.variant != other.variant || self.radius_or_time != other.radius_or_time {
            return Err(Error::Conflict("mismatched disconnect samples".into()));
        }
        Ok(DisconnectSample {
            variant: self.variant,
            radius_or_time: self.radius_or_time,
            trials: self.trials + other.trials,
            successes: self.successes + other.successes,
        })
    }
}

/// Reusable trial scratch: site/edge stamps over a grid centered so walks
/// stay in range, plus the search stamps and heap.
struct Scratch {
    /// Sites per side.
    side: usize,
    /// Grid origin offset: site (x, y) maps to (x + off, y + off).
    off: i32,
    epoch: u32,
    visited: Vec<u32>,
    h_edges: Vec<u32>,
    v_edges: Vec<u32>,
    face_seen: Vec<u32>,
    heap: BinaryHeap<(i64, u64)>,
}

impl Scratch {
    fn new(side: usize, off: i32) -> Scratch {
        Scratch {
            side,
            off,
            epoch: 0,
            visited: vec![0; side * side],
            h_edges: vec![0; side * side],
            v_edges: vec![0; side * side],
            face_seen: vec![0; side * side],
            heap: BinaryHeap::new(),
        }
    }

    #[inline]
    fn idx(&self, x: i32, y: i32) -> usize {
        debug_assert!(x + self.off >= 0 && y + self.off >= 0);
        (y + self.off) as usize * self.side + (x + self.off) as usize
    }

    fn next_trial(&mut self) {
        self.epoch += 1;
        self.heap.clear();
    }

    /// Walk one step from `pos`, stamping the site and the traversed edge.
    #[inline]
    fn step(&mut self, pos: &mut Point, dir: Direction) {
        let (dx, dy) = dir.delta();
        let from = *pos;
        pos.x += dx;
        pos.y += dy;
        let e = self.epoch;
        let site = self.idx(pos.x, pos.y);
        self.visited[site] = e;
        let edge = match dir {
            Direction::East => self.idx(from.x, from.y),
            Direction::West => self.idx(pos.x, pos.y),
            Direction::North => self.idx(from.x, from.y),
            Direction::South => self.idx(pos.x, pos.y),
        };
        match dir {
            Direction::East | Direction::West => self.h_edges[edge] = e,
            Direction::North | Direction::South => self.v_edges[edge] = e,
        }
    }

    #[inline]
    fn h_edge(&self, x: i32, y: i32) -> bool {
        self.h_edges[self.idx(x, y)] == self.epoch
    }

    #[inline]
    fn v_edge(&self, x: i32, y: i32) -> bool {
        self.v_edges[self.idx(x, y)] == self.epoch
    }

    /// Does any of the origin's four incident faces reach past `escape_r2`
    /// (squared distance of face anchors certain to be outside every walk)?
    ///
    /// Faces are keyed by their lower-left corner. Neighbors are blocked by
    /// traversed edges exactly as in the dense extractor. Best-first on
    /// distance from the origin, descending.
    fn origin_escapes(&mut self, escape_r2: i64) -> bool {
        for (fx, fy) in [(0, 0), (-1, 0), (0, -1), (-1, -1)] {
            self.push_face(fx, fy);
        }
        // Valid face anchors span [-off, off-1] in unoffset coordinates.
        let hi = self.off - 1;
        let lo = -self.off;
        while let Some((d2, packed)) = self.heap.pop() {
            if d2 >= escape_r2 {
                return true;
            }
            let (fx, fy) = unpack(packed);
            // Neighbor faces through untraversed edges.
            if fx + 1 <= hi && !self.v_edge(fx + 1, fy) {
                self.push_face(fx + 1, fy);
            }
            if fx - 1 >= lo && !self.v_edge(fx, fy) {
                self.push_face(fx - 1, fy);
            }
            if fy + 1 <= hi && !self.h_edge(fx, fy + 1) {
                self.push_face(fx, fy + 1);
            }
            if fy - 1 >= lo && !self.h_edge(fx, fy) {
                self.push_face(fx, fy - 1);
            }
        }
        false
    }

    #[inline]
    fn push_face(&mut self, fx: i32, fy: i32) {
        let i = self.idx(fx, fy);
        if self.face_seen[i] != self.epoch {
            self.face_seen[i] = self.epoch;
            self.heap.push((face_dist2(fx, fy), pack(fx, fy)));
        }
    }
}

#[inline]
fn pack(x: i32, y: i32) -> u64 {
    ((x as u32 as u64) << 32) | (y as u32 as u64)
}

#[inline]
fn unpack(p: u64) -> (i32, i32) {
    ((p >> 32) as u32 as i32, (p & 0xFFFF_FFFF) as u32 as i32)
}

/// Squared distance of the face center (fx+1/2, fy+1/2) from the origin,
/// times 4 to stay integral.
#[inline]
fn face_dist2(fx: i32, fy: i32) -> i64 {
    let cx = 2 * fx as i64 + 1;
    let cy = 2 * fy as i64 + 1;
    cx * cx + cy * cy
}

/// Run one walk from the origin until `|S|^2 >= r2`, stamping as it goes.
#[inline]
fn run_until_exit(scratch: &mut Scratch, rng: &mut Xoshiro256, r2: i64) {
    let mut pos = Point::ORIGIN;
    loop {
        let dir = Direction::from_bits(rng.next_u64());
        scratch.step(&mut pos, dir);
        let n2 = pos.x as i64 * pos.x as i64 + pos.y as i64 * pos.y as i64;
        if n2 >= r2 {
            return;
        }
    }
}

/// One walk started at the origin, run to its first exit of `D(radius)`;
/// success iff the origin still touches the unbounded component.
pub fn one_sided_disconnect_prob(
    radius: u32,
    trials: u64,
    seed: u64,
) -> Result<DisconnectSample> {
    if radius == 0 {
        return Err(Error::argument("radius", "must be >= 1"));
    }
    let successes = run_radius_trials(radius, trials, seed, 1);
    Ok(DisconnectSample {
        variant: DisconnectVariant::OneSidedRadius,
        radius_or_time: radius as u64,
        trials,
        successes,
    })
}

/// Time- or radius-limited pair of independent walks from the origin;
/// success iff the origin touches the unbounded component of the union's
/// complement.
pub fn two_sided_disconnect_prob(
    param: u32,
    fixed_radius: bool,
    trials: u64,
    seed: u64,
) -> Result<DisconnectSample> {
    if param == 0 {
        return Err(Error::argument("param", "must be >= 1"));
    }
    if fixed_radius {
        let successes = run_radius_trials(param, trials, seed, 2);
        Ok(DisconnectSample {
            variant: DisconnectVariant::TwoSidedRadius,
            radius_or_time: param as u64,
            trials,
            successes,
        })
    } else {
        let successes = run_time_trials(param as usize, trials, seed);
        Ok(DisconnectSample {
            variant: DisconnectVariant::TwoSidedTime,
            radius_or_time: param as u64,
            trials,
            successes,
        })
    }
}

fn run_radius_trials(radius: u32, trials: u64, seed: u64, walks: u32) -> u64 {
    let estimator_seed = split_seed(seed, radius as u64);
    // Walks stop on first exit, so they never leave D(radius + 1); pad a
    // couple of cells for the face search.
    let half = radius as i32 + 3;
    let side = (2 * half + 1) as usize;
    let r2 = radius as i64 * radius as i64;
    // Any face anchored beyond radius+1 in max-norm is untouched by edges;
    // its center distance exceeds this bound.
    let escape_r2 = {
        let d = 2 * (radius as i64 + 2);
        d * d
    };
    let threads = rayon::current_num_threads().max(1);
    let chunk = trials.div_ceil(threads as u64);
    (0..threads as u64)
        .into_par_iter()
        .map(|t| {
            let lo = t * chunk;
            let hi = ((t + 1) * chunk).min(trials);
            if lo >= hi {
                return 0u64;
            }
            let mut scratch = Scratch::new(side, half);
            let mut hits = 0u64;
            for trial in lo..hi {
                scratch.next_trial();
                let origin = scratch.idx(0, 0);
                scratch.visited[origin] = scratch.epoch;
                let mut rng = Xoshiro256::seed_from(split_seed(estimator_seed, trial));
                for _ in 0..walks {
                    run_until_exit(&mut scratch, &mut rng, r2);
                }
                if scratch.origin_escapes(escape_r2) {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

fn run_time_trials(steps: usize, trials: u64, seed: u64) -> u64 {
    let estimator_seed = split_seed(seed, steps as u64);
    let threads = rayon::current_num_threads().max(1);
    let chunk = trials.div_ceil(threads as u64);
    (0..threads as u64)
        .into_par_iter()
        .map(|t| {
            let lo = t * chunk;
            let hi = ((t + 1) * chunk).min(trials);
            if lo >= hi {
                return 0u64;
            }
            // A fixed-time walk cannot leave max-norm `steps`, but its
            // typical range is ~sqrt(steps); start small and regrow the
            // scratch when a trial needs more room.
            let mut half = (6.0 * (steps as f64).sqrt()) as i32 + 4;
            let mut scratch = Scratch::new((2 * half + 1) as usize, half);
            let mut dirs: Vec<Direction> = Vec::with_capacity(2 * steps);
            let mut hits = 0u64;
            for trial in lo..hi {
                let mut rng = Xoshiro256::seed_from(split_seed(estimator_seed, trial));
                dirs.clear();
                let mut max_abs = 0i32;
                for _ in 0..2 {
                    let mut pos = Point::ORIGIN;
                    for _ in 0..steps {
                        let dir = Direction::from_bits(rng.next_u64());
                        let (dx, dy) = dir.delta();
                        pos.x += dx;
                        pos.y += dy;
                        max_abs = max_abs.max(pos.x.abs()).max(pos.y.abs());
                        dirs.push(dir);
                    }
                }
                if max_abs + 3 > half {
                    half = max_abs + 8;
                    scratch = Scratch::new((2 * half + 1) as usize, half);
                }
                scratch.next_trial();
                let escape_r2 = {
                    let d = 2 * (max_abs as i64 + 2);
                    d * d
                };
                let origin = scratch.idx(0, 0);
                scratch.visited[origin] = scratch.epoch;
                let mut pos = Point::ORIGIN;
                for (k, &dir) in dirs.iter().enumerate() {
                    if k == steps {
                        pos = Point::ORIGIN;
                    }
                    scratch.step(&mut pos, dir);
                }
                if scratch.origin_escapes(escape_r2) {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

/// Escape-before-hitting for the lattice half-line `{(k, 0): 0 <= k <= n}`.
///
/// Each trial runs a walk from `x` until it exits `D(n)` (success) or hits
/// the obstacle (failure).
pub fn beurling_prob(x: Point, n: u32, trials: u64, seed: u64) -> Result<DisconnectSample> {
    let on_obstacle = |p: Point| p.y == 0 && p.x >= 0 && p.x <= n as i32;
    if on_obstacle(x) {
        return Err(Error::argument(
            "x",
            "start lies on the obstacle; the escape probability is identically 0",
        ));
    }
    let x_norm2 = x.x as i64 * x.x as i64 + x.y as i64 * x.y as i64;
    if x_norm2 > n as i64 * n as i64 {
        return Err(Error::argument("x", format!("|x| > n = {n}")));
    }
    let n2 = n as i64 * n as i64;
    let estimator_seed = split_seed(seed, (x.x as u64) << 32 | (x.y as u64 & 0xFFFF_FFFF));
    let threads = rayon::current_num_threads().max(1);
    let chunk = trials.div_ceil(threads as u64);
    let successes: u64 = (0..threads as u64)
        .into_par_iter()
        .map(|t| {
            let lo = t * chunk;
            let hi = ((t + 1) * chunk).min(trials);
            let mut hits = 0u64;
            for trial in lo..hi {
                let mut rng = Xoshiro256::seed_from(split_seed(estimator_seed, trial));
                let mut pos = x;
                loop {
                    let dir = Direction::from_bits(rng.next_u64());
                    let (dx, dy) = dir.delta();
                    pos.x += dx;
                    pos.y += dy;
                    if on_obstacle(pos) {
                        break;
                    }
                    let r2 = pos.x as i64 * pos.x as i64 + pos.y as i64 * pos.y as i64;
                    if r2 >= n2 {
                        hits += 1;
                        break;
                    }
                }
            }
            hits
        })
        .sum();
    Ok(DisconnectSample {
        variant: DisconnectVariant::Beurling,
        radius_or_time: n as u64,
        trials,
        successes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_one_never_disconnects() {
        let s = one_sided_disconnect_prob(1, 500, 3).unwrap();
        assert_eq!(s.successes, s.trials);
    }

    #[test]
    fn two_sided_radius_one_never_disconnects() {
        let s = two_sided_disconnect_prob(1, true, 500, 3).unwrap();
        assert_eq!(s.successes, s.trials);
    }

    #[test]
    fn estimators_are_deterministic() {
        let a = one_sided_disconnect_prob(16, 2000, 11).unwrap();
        let b = one_sided_disconnect_prob(16, 2000, 11).unwrap();
        assert_eq!(a, b);
        let c = two_sided_disconnect_prob(64, false, 500, 11).unwrap();
        let d = two_sided_disconnect_prob(64, false, 500, 11).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn merge_is_exact() {
        let a = one_sided_disconnect_prob(16, 1000, 1).unwrap();
        let b = DisconnectSample {
            trials: 500,
            successes: 100,
            ..a
        };
        let m = a.merge(&b).unwrap();
        assert_eq!(m.trials, 1500);
        assert_eq!(m.successes, a.successes + 100);
        let other = two_sided_disconnect_prob(16, true, 10, 1).unwrap();
        assert!(a.merge(&other).is_err());
    }

    #[test]
    fn beurling_rejects_start_on_obstacle() {
        assert!(beurling_prob(Point::new(3, 0), 64, 10, 1).is_err());
        assert!(beurling_prob(Point::new(0, 0), 64, 10, 1).is_err());
        // Off the obstacle is fine.
        assert!(beurling_prob(Point::new(-1, 0), 64, 10, 1).is_ok());
    }

    #[test]
    fn beurling_probability_grows_with_distance() {
        let near = beurling_prob(Point::new(0, 1), 64, 4000, 5).unwrap();
        let far = beurling_prob(Point::new(0, 32), 64, 4000, 5).unwrap();
        assert!(far.p_hat() > near.p_hat());
    }

    #[test]
    fn disconnect_probability_decreases_with_radius() {
        let small = one_sided_disconnect_prob(8, 4000, 7).unwrap();
        let large = one_sided_disconnect_prob(64, 4000, 7).unwrap();
        assert!(large.p_hat() < small.p_hat());
    }

    #[test]
    fn escape_matches_dense_extractor() {
        // Cross-check the scratch escape test against the dense grid path
        // on replayed walks.
        use crate::grid::OccupancyGrid;
        use crate::holes::unbounded_component;
        use crate::walk::WalkPath;

        let radius = 24u32;
        let r2 = radius as i64 * radius as i64;
        for trial in 0..400u64 {
            let estimator_seed = split_seed(99, radius as u64);
            let mut rng = Xoshiro256::seed_from(split_seed(estimator_seed, trial));
            // Replay the same directions into a WalkPath.
            let mut dirs = Vec::new();
            let mut pos = Point::ORIGIN;
            loop {
                let dir = Direction::from_bits(rng.next_u64());
                let (dx, dy) = dir.delta();
                pos.x += dx;
                pos.y += dy;
                dirs.push(dir);
                if pos.x as i64 * pos.x as i64 + pos.y as i64 * pos.y as i64 >= r2 {
                    break;
                }
            }
            let walk = WalkPath::from_steps(0, dirs.clone());
            let grid = OccupancyGrid::build(&walk).unwrap();
            let expected = unbounded_component(&grid).site_in_closure(Point::ORIGIN);

            let half = radius as i32 + 3;
            let mut scratch = Scratch::new((2 * half + 1) as usize, half);
            scratch.next_trial();
            let origin = scratch.idx(0, 0);
            scratch.visited[origin] = scratch.epoch;
            let mut pos = Point::ORIGIN;
            for &d in &dirs {
                scratch.step(&mut pos, d);
            }
            let escape_r2 = {
                let d = 2 * (radius as i64 + 2);
                d * d
            };
            let got = scratch.origin_escapes(escape_r2);
            assert_eq!(got, expected, "trial {trial}");
        }
    }
}
