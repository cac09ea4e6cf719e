//! Bit-packed occupancy of visited sites and traversed edges.
//!
//! The grid covers the walk's bounding box padded by one site on every side,
//! so the border ring of sites is never visited and the border ring of faces
//! always belongs to the unbounded component.

use crate::error::{Error, Result};
use crate::walk::{Point, Rect, WalkPath};

/// Default cap on grid cells (sites + faces + edges scale linearly with it).
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 33;

/// Dense 2D bit array, row-major.
#[derive(Debug, Clone)]
pub struct BitGrid {
    width: usize,
    height: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn new(width: usize, height: usize) -> BitGrid {
        let bits = width * height;
        BitGrid {
            width,
            height,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        let bit = y * self.width + x;
        self.words[bit >> 6] & (1 << (bit & 63)) != 0
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        debug_assert!(x < self.width && y < self.height);
        let bit = y * self.width + x;
        self.words[bit >> 6] |= 1 << (bit & 63);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }
}

/// Site and edge occupancy of one walk over its padded bounding box.
///
/// Site `(x, y)` in absolute coordinates maps to grid coordinates
/// `(x - bbox.min_x, y - bbox.min_y)`. `h_edges` bit `(i, j)` is the unit
/// edge from site `(i, j)` to `(i + 1, j)`; `v_edges` bit `(i, j)` runs from
/// `(i, j)` to `(i, j + 1)`. Faces are indexed by their lower-left corner:
/// face `(i, j)` is the open unit square `(i, i+1) x (j, j+1)` in grid
/// coordinates, giving `(width-1) x (height-1)` faces.
#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    bbox: Rect,
    width: usize,
    height: usize,
    pub(crate) visited: BitGrid,
    pub(crate) h_edges: BitGrid,
    pub(crate) v_edges: BitGrid,
}

impl OccupancyGrid {
    /// Rasterize a whole walk.
    pub fn build(walk: &WalkPath) -> Result<OccupancyGrid> {
        Self::build_prefix(walk, walk.step_count())
    }

    /// Rasterize the first `prefix_len` steps of a walk.
    pub fn build_prefix(walk: &WalkPath, prefix_len: usize) -> Result<OccupancyGrid> {
        Self::build_prefix_with_budget(walk, prefix_len, DEFAULT_CELL_BUDGET)
    }

    pub fn build_prefix_with_budget(
        walk: &WalkPath,
        prefix_len: usize,
        budget: u64,
    ) -> Result<OccupancyGrid> {
        assert!(prefix_len <= walk.step_count());
        let positions = &walk.positions()[..=prefix_len];
        let mut bbox = Rect {
            min_x: i32::MAX,
            min_y: i32::MAX,
            max_x: i32::MIN,
            max_y: i32::MIN,
        };
        for p in positions {
            bbox.min_x = bbox.min_x.min(p.x);
            bbox.max_x = bbox.max_x.max(p.x);
            bbox.min_y = bbox.min_y.min(p.y);
            bbox.max_y = bbox.max_y.max(p.y);
        }
        let bbox = bbox.padded(1);
        let width = bbox.width() as u64;
        let height = bbox.height() as u64;
        let cells = width
            .checked_mul(height)
            .ok_or(Error::Resource {
                what: "grid cells",
                requested: u64::MAX,
                budget,
            })?;
        if cells > budget {
            return Err(Error::Resource {
                what: "grid cells",
                requested: cells,
                budget,
            });
        }
        let width = width as usize;
        let height = height as usize;
        let mut grid = OccupancyGrid {
            bbox,
            width,
            height,
            visited: BitGrid::new(width, height),
            h_edges: BitGrid::new(width - 1, height),
            v_edges: BitGrid::new(width, height - 1),
        };
        let mut prev = positions[0];
        grid.visited
            .set((prev.x - bbox.min_x) as usize, (prev.y - bbox.min_y) as usize);
        for &p in &positions[1..] {
            let gx = (p.x - bbox.min_x) as usize;
            let gy = (p.y - bbox.min_y) as usize;
            grid.visited.set(gx, gy);
            if p.x != prev.x {
                grid.h_edges.set(gx.min((prev.x - bbox.min_x) as usize), gy);
            } else {
                grid.v_edges.set(gx, gy.min((prev.y - bbox.min_y) as usize));
            }
            prev = p;
        }
        Ok(grid)
    }

    pub fn bbox(&self) -> Rect {
        self.bbox
    }

    /// Site columns.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Site rows.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn face_cols(&self) -> usize {
        self.width - 1
    }

    pub fn face_rows(&self) -> usize {
        self.height - 1
    }

    pub fn total_faces(&self) -> u64 {
        self.face_cols() as u64 * self.face_rows() as u64
    }

    pub fn visited_count(&self) -> u64 {
        self.visited.count_ones()
    }

    pub fn traversed_edge_count(&self) -> u64 {
        self.h_edges.count_ones() + self.v_edges.count_ones()
    }

    #[inline]
    pub fn to_grid(&self, p: Point) -> Option<(usize, usize)> {
        if self.bbox.contains(p) {
            Some((
                (p.x - self.bbox.min_x) as usize,
                (p.y - self.bbox.min_y) as usize,
            ))
        } else {
            None
        }
    }

    #[inline]
    pub fn to_abs(&self, gx: usize, gy: usize) -> Point {
        Point::new(self.bbox.min_x + gx as i32, self.bbox.min_y + gy as i32)
    }

    #[inline]
    pub fn is_visited(&self, gx: usize, gy: usize) -> bool {
        self.visited.get(gx, gy)
    }

    #[inline]
    pub fn is_visited_abs(&self, p: Point) -> bool {
        match self.to_grid(p) {
            Some((gx, gy)) => self.visited.get(gx, gy),
            None => false,
        }
    }

    #[inline]
    pub fn h_edge(&self, i: usize, j: usize) -> bool {
        self.h_edges.get(i, j)
    }

    #[inline]
    pub fn v_edge(&self, i: usize, j: usize) -> bool {
        self.v_edges.get(i, j)
    }

    /// Scan that every set edge bit has both endpoint sites set.
    pub fn edges_have_visited_endpoints(&self) -> bool {
        for j in 0..self.height {
            for i in 0..self.width - 1 {
                if self.h_edges.get(i, j) && !(self.visited.get(i, j) && self.visited.get(i + 1, j))
                {
                    return false;
                }
            }
        }
        for j in 0..self.height - 1 {
            for i in 0..self.width {
                if self.v_edges.get(i, j) && !(self.visited.get(i, j) && self.visited.get(i, j + 1))
                {
                    return false;
                }
            }
        }
        true
    }

    /// Scan that no visited site touches the bbox border.
    pub fn border_is_clear(&self) -> bool {
        for i in 0..self.width {
            if self.visited.get(i, 0) || self.visited.get(i, self.height - 1) {
                return false;
            }
        }
        for j in 0..self.height {
            if self.visited.get(0, j) || self.visited.get(self.width - 1, j) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::Direction::*;

    #[test]
    fn unit_loop() {
        let w = WalkPath::from_steps(0, vec![East, North, West, South]);
        let g = OccupancyGrid::build(&w).unwrap();
        assert_eq!(g.visited_count(), 4);
        assert_eq!(g.traversed_edge_count(), 4);
        assert!(g.edges_have_visited_endpoints());
        assert!(g.border_is_clear());
        assert_eq!(g.bbox(), Rect { min_x: -1, min_y: -1, max_x: 2, max_y: 2 });
    }

    #[test]
    fn two_steps_east() {
        let w = WalkPath::from_steps(0, vec![East, East]);
        let g = OccupancyGrid::build(&w).unwrap();
        assert_eq!(g.visited_count(), 3);
        assert_eq!(g.traversed_edge_count(), 2);
    }

    #[test]
    fn revisited_edge_is_idempotent() {
        let w = WalkPath::from_steps(0, vec![East, West, East, West]);
        let g = OccupancyGrid::build(&w).unwrap();
        assert_eq!(g.visited_count(), 2);
        assert_eq!(g.traversed_edge_count(), 1);
    }

    #[test]
    fn empty_walk_grid() {
        let w = WalkPath::from_steps(0, vec![]);
        let g = OccupancyGrid::build(&w).unwrap();
        assert_eq!(g.visited_count(), 1);
        assert_eq!(g.traversed_edge_count(), 0);
        assert_eq!(g.width(), 3);
        assert_eq!(g.height(), 3);
        assert_eq!(g.total_faces(), 4);
    }

    #[test]
    fn grid_budget() {
        let w = WalkPath::generate(3, 4000).unwrap();
        let err = OccupancyGrid::build_prefix_with_budget(&w, 4000, 16).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }
}
