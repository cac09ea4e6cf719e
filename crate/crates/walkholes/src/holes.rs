//! Hole extraction: lattice holes (unvisited-site components), planar holes
//! (face components of the path complement), the unbounded component,
//! boundary-square counts and first-enclosure times.
//!
//! Both cell graphs are labeled with a single scanline pass over rows and a
//! union-find over provisional cluster ids (Hoshen-Kopelman). Only per-root
//! summaries are kept; cell sets of individual holes are rebuilt from the run
//! list when a caller needs them (shape census).

use serde::{Deserialize, Serialize};

use crate::grid::{BitGrid, OccupancyGrid};
use crate::walk::{Point, Rect, WalkPath};

/// Which notion of hole a record describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoleKind {
    /// 4-connected component of unvisited lattice sites; area = cardinality.
    Lattice,
    /// Component of unit faces joined through untraversed edges; area =
    /// face count = Lebesgue measure.
    Planar,
}

/// One bounded component of the walk's complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleRecord {
    pub id: u32,
    pub kind: HoleKind,
    pub area: u64,
    /// Absolute coordinates. For planar holes the box is over face anchors
    /// (lower-left corners).
    pub bbox: Rect,
    /// First cell in row-major scan order (site, or face anchor).
    pub representative: Point,
}

/// Union-find over provisional scanline labels with per-root accumulators.
struct Clusters {
    parent: Vec<u32>,
    area: Vec<u64>,
    min_x: Vec<u32>,
    max_x: Vec<u32>,
    min_y: Vec<u32>,
    max_y: Vec<u32>,
    first: Vec<(u32, u32)>,
    border: Vec<bool>,
}

impl Clusters {
    fn new() -> Clusters {
        Clusters {
            parent: Vec::new(),
            area: Vec::new(),
            min_x: Vec::new(),
            max_x: Vec::new(),
            min_y: Vec::new(),
            max_y: Vec::new(),
            first: Vec::new(),
            border: Vec::new(),
        }
    }

    /// New singleton cluster for a run starting at `(x, y)` of length `len`.
    fn make(&mut self, x: u32, y: u32, len: u32, touches_border: bool) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.area.push(len as u64);
        self.min_x.push(x);
        self.max_x.push(x + len - 1);
        self.min_y.push(y);
        self.max_y.push(y);
        self.first.push((y, x));
        self.border.push(touches_border);
        id
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let gp = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = gp;
            i = gp;
        }
        i
    }

    /// Merge roots, folding accumulators into the survivor.
    fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return ra;
        }
        // Keep the root with the smaller first cell so representatives are
        // scan-order canonical.
        let (keep, drop) = if self.first[ra as usize] <= self.first[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[drop as usize] = keep;
        self.area[keep as usize] += self.area[drop as usize];
        self.min_x[keep as usize] = self.min_x[keep as usize].min(self.min_x[drop as usize]);
        self.max_x[keep as usize] = self.max_x[keep as usize].max(self.max_x[drop as usize]);
        self.min_y[keep as usize] = self.min_y[keep as usize].min(self.min_y[drop as usize]);
        self.max_y[keep as usize] = self.max_y[keep as usize].max(self.max_y[drop as usize]);
        self.border[keep as usize] |= self.border[drop as usize];
        keep
    }
}

/// A horizontal run of cells sharing one provisional label.
#[derive(Debug, Clone, Copy)]
struct Run {
    row: u32,
    lo: u32,
    /// Inclusive.
    hi: u32,
    label: u32,
}

/// Scanline labeling outcome for one cell graph.
pub(crate) struct Labeling {
    runs: Vec<Run>,
    clusters: Clusters,
    cols: usize,
    rows: usize,
}

impl Labeling {
    /// Resolved root of a run's label.
    fn root_of_run(&mut self, idx: usize) -> u32 {
        let l = self.runs[idx].label;
        self.clusters.find(l)
    }
}

/// Label 4-connected components of unvisited sites.
pub(crate) fn label_unvisited_sites(grid: &OccupancyGrid) -> Labeling {
    label_open_cells(&grid.visited, grid.width(), grid.height())
}

/// Label 4-connected components of unset bits in a blocked-cell bitmap.
pub(crate) fn label_open_cells(blocked: &BitGrid, cols: usize, rows: usize) -> Labeling {
    let mut clusters = Clusters::new();
    let mut runs: Vec<Run> = Vec::new();
    // Index into `runs` of the first run of the previous row.
    let mut prev_start = 0usize;
    let mut prev_end = 0usize;

    for y in 0..rows {
        let row_start = runs.len();
        let mut x = 0usize;
        let mut cursor = prev_start;
        while x < cols {
            if blocked.get(x, y) {
                x += 1;
                continue;
            }
            let lo = x;
            while x < cols && !blocked.get(x, y) {
                x += 1;
            }
            let hi = x - 1;
            let touches = y == 0 || y == rows - 1 || lo == 0 || hi == cols - 1;
            let mut label = clusters.make(lo as u32, y as u32, (hi - lo + 1) as u32, touches);
            // Union with overlapping runs of the previous row.
            while cursor < prev_end && (runs[cursor].hi as usize) < lo {
                cursor += 1;
            }
            let mut k = cursor;
            while k < prev_end && (runs[k].lo as usize) <= hi {
                label = clusters.union(label, runs[k].label);
                k += 1;
            }
            runs.push(Run {
                row: y as u32,
                lo: lo as u32,
                hi: hi as u32,
                label,
            });
        }
        prev_start = row_start;
        prev_end = runs.len();
    }
    Labeling {
        runs,
        clusters,
        cols,
        rows,
    }
}

/// Label face components joined through untraversed edges.
///
/// Within a row, faces `(i, j)` and `(i+1, j)` join unless `v_edge(i+1, j)`
/// is traversed; rows `j-1` and `j` join at column `i` unless `h_edge(i, j)`
/// is traversed. Diagonal contact never joins.
pub(crate) fn label_faces(grid: &OccupancyGrid) -> Labeling {
    let cols = grid.face_cols();
    let rows = grid.face_rows();
    let mut clusters = Clusters::new();
    let mut runs: Vec<Run> = Vec::new();
    let mut prev_start = 0usize;
    let mut prev_end = 0usize;

    for y in 0..rows {
        let row_start = runs.len();
        let mut x = 0usize;
        let mut cursor = prev_start;
        while x < cols {
            // A face run extends right while the separating vertical edge is
            // untraversed.
            let lo = x;
            while x + 1 < cols && !grid.v_edge(x + 1, y) {
                x += 1;
            }
            let hi = x;
            x += 1;
            let touches = y == 0 || y == rows - 1 || lo == 0 || hi == cols - 1;
            let mut label = clusters.make(lo as u32, y as u32, (hi - lo + 1) as u32, touches);
            if y > 0 {
                while cursor < prev_end && (runs[cursor].hi as usize) < lo {
                    cursor += 1;
                }
                let mut k = cursor;
                while k < prev_end && (runs[k].lo as usize) <= hi {
                    // Overlap columns join only where the horizontal edge
                    // between the rows is untraversed.
                    let a = runs[k].lo.max(lo as u32);
                    let b = runs[k].hi.min(hi as u32);
                    for i in a..=b {
                        if !grid.h_edge(i as usize, y) {
                            label = clusters.union(label, runs[k].label);
                            break;
                        }
                    }
                    k += 1;
                }
            }
            runs.push(Run {
                row: y as u32,
                lo: lo as u32,
                hi: hi as u32,
                label,
            });
        }
        prev_start = row_start;
        prev_end = runs.len();
    }
    Labeling {
        runs,
        clusters,
        cols,
        rows,
    }
}

/// Components of a labeling, split into holes and border-touching roots.
pub(crate) struct Components {
    /// Root id -> hole index + 1, or 0 for border components.
    hole_of_root: Vec<u32>,
    pub holes: Vec<HoleRecord>,
    labeling: Labeling,
}

impl Components {
    pub(crate) fn build(mut labeling: Labeling, kind: HoleKind, origin: Point) -> Components {
        let n = labeling.clusters.parent.len();
        let mut hole_of_root = vec![0u32; n];
        let mut holes = Vec::new();
        // Roots in scan order of their first cell: iterate runs in order and
        // take each root the first time it appears.
        for idx in 0..labeling.runs.len() {
            let root = labeling.root_of_run(idx);
            let r = root as usize;
            if labeling.clusters.border[r] || hole_of_root[r] != 0 {
                continue;
            }
            let c = &labeling.clusters;
            let (fy, fx) = c.first[r];
            let id = holes.len() as u32;
            holes.push(HoleRecord {
                id,
                kind,
                area: c.area[r],
                bbox: Rect {
                    min_x: origin.x + c.min_x[r] as i32,
                    min_y: origin.y + c.min_y[r] as i32,
                    max_x: origin.x + c.max_x[r] as i32,
                    max_y: origin.y + c.max_y[r] as i32,
                },
                representative: Point::new(origin.x + fx as i32, origin.y + fy as i32),
            });
            hole_of_root[r] = id + 1;
        }
        Components {
            hole_of_root,
            holes,
            labeling,
        }
    }

    /// Hole index of the component containing cell `(x, y)` in grid
    /// coordinates, if that cell lies in any run of the labeling.
    pub fn hole_at(&mut self, x: usize, y: usize) -> CellComponent {
        let runs = &self.labeling.runs;
        // Binary search for the row, then scan its runs (rows are contiguous).
        let row = y as u32;
        let first = runs.partition_point(|r| r.row < row);
        let mut i = first;
        while i < runs.len() && runs[i].row == row {
            if (runs[i].lo as usize) <= x && x <= runs[i].hi as usize {
                let root = self.labeling.root_of_run(i);
                let h = self.hole_of_root[root as usize];
                return if h == 0 {
                    CellComponent::Unbounded
                } else {
                    CellComponent::Hole((h - 1) as usize)
                };
            }
            i += 1;
        }
        CellComponent::Occupied
    }

    /// Visit every cell of hole `hole_idx` in scan order.
    pub fn for_each_cell(&mut self, hole_idx: usize, mut f: impl FnMut(u32, u32)) {
        for i in 0..self.labeling.runs.len() {
            let root = self.labeling.root_of_run(i);
            if self.hole_of_root[root as usize] == (hole_idx as u32) + 1 {
                let run = self.labeling.runs[i];
                for x in run.lo..=run.hi {
                    f(x, run.row);
                }
            }
        }
    }

    /// Total cells over border-touching components.
    pub fn unbounded_area(&mut self) -> u64 {
        let mut total = 0u64;
        for i in 0..self.labeling.runs.len() {
            let root = self.labeling.root_of_run(i);
            if self.hole_of_root[root as usize] == 0 {
                let run = self.labeling.runs[i];
                total += (run.hi - run.lo + 1) as u64;
            }
        }
        total
    }

    /// Bitset of cells lying in border-touching components.
    fn unbounded_bitset(&mut self) -> BitGrid {
        let mut bits = BitGrid::new(self.labeling.cols.max(1), self.labeling.rows.max(1));
        for i in 0..self.labeling.runs.len() {
            let root = self.labeling.root_of_run(i);
            if self.hole_of_root[root as usize] == 0 {
                let run = self.labeling.runs[i];
                for x in run.lo..=run.hi {
                    bits.set(x as usize, run.row as usize);
                }
            }
        }
        bits
    }

    /// Bitset of cells in holes with `area >= min_area`.
    fn qualifying_bitset(&mut self, min_area: u64) -> (BitGrid, bool) {
        let mut bits = BitGrid::new(self.labeling.cols.max(1), self.labeling.rows.max(1));
        let mut any = false;
        for i in 0..self.labeling.runs.len() {
            let root = self.labeling.root_of_run(i);
            let h = self.hole_of_root[root as usize];
            if h != 0 && self.holes[(h - 1) as usize].area >= min_area {
                any = true;
                let run = self.labeling.runs[i];
                for x in run.lo..=run.hi {
                    bits.set(x as usize, run.row as usize);
                }
            }
        }
        (bits, any)
    }
}

/// Where a cell sits relative to the hole decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellComponent {
    Hole(usize),
    Unbounded,
    /// The cell is not part of the labeled complement (visited site).
    Occupied,
}

/// Full face decomposition of a grid: hole records plus component lookup.
pub struct PlanarComponents(pub(crate) Components);

impl PlanarComponents {
    pub fn extract(grid: &OccupancyGrid) -> PlanarComponents {
        let origin = Point::new(grid.bbox().min_x, grid.bbox().min_y);
        PlanarComponents(Components::build(label_faces(grid), HoleKind::Planar, origin))
    }

    pub fn holes(&self) -> &[HoleRecord] {
        &self.0.holes
    }

    /// Component of the face with lower-left corner `(gx, gy)` in grid
    /// coordinates. Faces always belong to some component.
    pub fn face_component(&mut self, gx: usize, gy: usize) -> CellComponent {
        self.0.hole_at(gx, gy)
    }

    pub fn unbounded_face_count(&mut self) -> u64 {
        self.0.unbounded_area()
    }
}

/// Site decomposition: lattice holes plus component lookup.
pub struct LatticeComponents(pub(crate) Components);

impl LatticeComponents {
    pub fn extract(grid: &OccupancyGrid) -> LatticeComponents {
        let origin = Point::new(grid.bbox().min_x, grid.bbox().min_y);
        LatticeComponents(Components::build(
            label_unvisited_sites(grid),
            HoleKind::Lattice,
            origin,
        ))
    }

    pub fn holes(&self) -> &[HoleRecord] {
        &self.0.holes
    }

    pub fn site_component(&mut self, gx: usize, gy: usize) -> CellComponent {
        self.0.hole_at(gx, gy)
    }
}

/// Bounded 4-connected components of unvisited sites; the border component
/// is excluded.
pub fn lattice_holes(grid: &OccupancyGrid) -> Vec<HoleRecord> {
    LatticeComponents::extract(grid).0.holes
}

/// Bounded face components of the path complement; the border component is
/// excluded.
pub fn planar_holes(grid: &OccupancyGrid) -> Vec<HoleRecord> {
    PlanarComponents::extract(grid).0.holes
}

/// Handle over the set of faces connected to the bbox border.
pub struct UnboundedFaces {
    bits: BitGrid,
    bbox: Rect,
    face_count: u64,
}

impl UnboundedFaces {
    pub fn face_count(&self) -> u64 {
        self.face_count
    }

    /// Face membership by grid coordinates of the face anchor.
    pub fn contains_face(&self, gx: usize, gy: usize) -> bool {
        self.bits.get(gx, gy)
    }

    /// A site lies in the closure of the unbounded component iff at least
    /// one of its four incident faces is unbounded.
    pub fn site_in_closure(&self, p: Point) -> bool {
        let fx = p.x - self.bbox.min_x;
        let fy = p.y - self.bbox.min_y;
        for (dx, dy) in [(-1, -1), (0, -1), (-1, 0), (0, 0)] {
            let x = fx + dx;
            let y = fy + dy;
            if x < 0 || y < 0 {
                // Faces outside the grid are unbounded by construction, but
                // they only neighbor border sites, which the padding keeps
                // unvisited; treat them as unbounded.
                return true;
            }
            let (x, y) = (x as usize, y as usize);
            if x >= self.bits.width() || y >= self.bits.height() {
                return true;
            }
            if self.bits.get(x, y) {
                return true;
            }
        }
        false
    }
}

/// The set of faces connected to the bbox border.
pub fn unbounded_component(grid: &OccupancyGrid) -> UnboundedFaces {
    let origin = Point::new(grid.bbox().min_x, grid.bbox().min_y);
    let mut comps = Components::build(label_faces(grid), HoleKind::Planar, origin);
    let bits = comps.unbounded_bitset();
    let face_count = bits.count_ones();
    UnboundedFaces {
        bits,
        bbox: grid.bbox(),
        face_count,
    }
}

/// Which component boundaries a boundary-square count covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontierScope {
    /// Boundaries of qualifying holes only.
    HolesOnly,
    /// Qualifying holes plus the outer frontier (the unbounded component's
    /// boundary).
    HolesAndOuter,
}

/// Result of a boundary-square count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCount {
    pub count: u64,
    /// Set when `min_area` exceeded every hole, so no hole qualified.
    pub no_qualifying_holes: bool,
}

/// Number of sites `y` whose closed unit square `Sq(y)` meets the boundary of
/// the union of qualifying components.
///
/// A closed unit square centered at a lattice site meets a closed unit edge
/// exactly when the site is one of the edge's endpoints, so the count is over
/// endpoints of traversed edges incident to a qualifying face component.
pub fn boundary_squares(
    grid: &OccupancyGrid,
    holes: &[HoleRecord],
    min_area: u64,
    scope: FrontierScope,
) -> BoundaryCount {
    let origin = Point::new(grid.bbox().min_x, grid.bbox().min_y);
    let mut comps = Components::build(label_faces(grid), HoleKind::Planar, origin);
    debug_assert_eq!(comps.holes.len(), holes.len());
    let (mut qualifying, any) = comps.qualifying_bitset(min_area);
    if scope == FrontierScope::HolesAndOuter {
        let unbounded = comps.unbounded_bitset();
        for (q, u) in qualifying.words_mut().iter_mut().zip(unbounded.words()) {
            *q |= u;
        }
    }
    let fcols = grid.face_cols();
    let frows = grid.face_rows();
    let face_q = |x: i64, y: i64| -> bool {
        if x < 0 || y < 0 || x >= fcols as i64 || y >= frows as i64 {
            // Off-grid faces belong to the unbounded sea.
            scope == FrontierScope::HolesAndOuter
        } else {
            qualifying.get(x as usize, y as usize)
        }
    };
    let mut marked = BitGrid::new(grid.width(), grid.height());
    for j in 0..grid.height() {
        for i in 0..grid.width() - 1 {
            if grid.h_edge(i, j) {
                let (i64i, i64j) = (i as i64, j as i64);
                if face_q(i64i, i64j - 1) || face_q(i64i, i64j) {
                    marked.set(i, j);
                    marked.set(i + 1, j);
                }
            }
        }
    }
    for j in 0..grid.height() - 1 {
        for i in 0..grid.width() {
            if grid.v_edge(i, j) {
                let (i64i, i64j) = (i as i64, j as i64);
                if face_q(i64i - 1, i64j) || face_q(i64i, i64j) {
                    marked.set(i, j);
                    marked.set(i, j + 1);
                }
            }
        }
    }
    BoundaryCount {
        count: marked.count_ones(),
        no_qualifying_holes: !any,
    }
}

/// Smallest prefix length after which `z` lies in a bounded component of the
/// requested kind; `None` if the walk never encloses `z` (including when the
/// walk visits `z` before enclosing it, or `z` lies outside the final bbox).
///
/// Once a point stops touching the unbounded component it never reconnects,
/// so the probe is monotone and a binary search over prefix lengths needs
/// one extraction per probe.
pub fn first_enclosure_time(walk: &WalkPath, z: Point, kind: HoleKind) -> Option<usize> {
    let total = walk.step_count();
    let sealed = |prefix: usize| -> bool {
        let grid = match OccupancyGrid::build_prefix(walk, prefix) {
            Ok(g) => g,
            Err(_) => return false,
        };
        let (gx, gy) = match grid.to_grid(z) {
            Some(c) => c,
            None => return false,
        };
        match kind {
            HoleKind::Lattice => {
                if grid.is_visited(gx, gy) {
                    return true;
                }
                let mut comps = LatticeComponents::extract(&grid);
                matches!(comps.site_component(gx, gy), CellComponent::Hole(_))
            }
            HoleKind::Planar => {
                let unbounded = unbounded_component(&grid);
                !unbounded.site_in_closure(z)
            }
        }
    };
    if !sealed(total) {
        return None;
    }
    let mut lo = 0usize; // invariant: !sealed(lo), sealed(hi)
    let mut hi = total;
    if sealed(0) {
        hi = 0;
    } else {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if sealed(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    // If the walk reached z within the sealing prefix, z is on the path and
    // never lay in a bounded component.
    let visited_by_then = walk.positions()[..=hi].contains(&z);
    if visited_by_then {
        None
    } else {
        Some(hi)
    }
}
