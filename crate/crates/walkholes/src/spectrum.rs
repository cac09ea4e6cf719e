//! Hole-area spectra: threshold counts, geometric bins, the normalized
//! ratio that converges to 2*pi, and the translation-equivalence shape
//! census. Natural logarithm is normative throughout the crate.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::OccupancyGrid;
use crate::holes::{HoleKind, HoleRecord, LatticeComponents, PlanarComponents};
use crate::walk::Point;

/// Sorted multiset of hole areas of one walk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoleSpectrum {
    /// Walk half-length: the walk has `2n` steps.
    pub n: u64,
    pub kind: HoleKind,
    /// Nondecreasing.
    pub areas: Vec<u64>,
    pub replica_id: u64,
}

impl HoleSpectrum {
    pub fn from_holes(n: u64, kind: HoleKind, holes: &[HoleRecord], replica_id: u64) -> Self {
        let mut areas: Vec<u64> = holes.iter().map(|h| h.area).collect();
        areas.sort_unstable();
        HoleSpectrum {
            n,
            kind,
            areas,
            replica_id,
        }
    }

    pub fn total_holes(&self) -> u64 {
        self.areas.len() as u64
    }

    /// Exact count of areas `>= r`; nonincreasing in `r`.
    pub fn count_at_least(&self, r: f64) -> u64 {
        let threshold = r.ceil() as u64;
        let idx = self.areas.partition_point(|&a| a < threshold);
        (self.areas.len() - idx) as u64
    }
}

/// One geometric bin `[lo, hi)` and the number of areas inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinCount {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

/// Counts per geometric bin `[n^(1-delta) c^j, n^(1-delta) c^(j+1))` with
/// `c = 1 + eps`, up to the last nonempty bin. The bin counts partition
/// `count_at_least(n^(1-delta))`.
pub fn bin_counts(spec: &HoleSpectrum, delta: f64, eps: f64) -> Result<Vec<BinCount>> {
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::argument("delta", format!("{delta} not in (0,1)")));
    }
    if eps <= 0.0 {
        return Err(Error::argument("eps", format!("{eps} must be positive")));
    }
    let base = (spec.n as f64).powf(1.0 - delta);
    let c = 1.0 + eps;
    let mut bins: Vec<BinCount> = Vec::new();
    let start = spec.areas.partition_point(|&a| (a as f64) < base);
    let mut j = 0u32;
    let mut hi = base * c;
    for &a in &spec.areas[start..] {
        let a = a as f64;
        while a >= hi {
            j += 1;
            hi = base * c.powi(j as i32 + 1);
        }
        while bins.len() < j as usize + 1 {
            let jj = bins.len() as i32;
            bins.push(BinCount {
                lo: base * c.powi(jj),
                hi: base * c.powi(jj + 1),
                count: 0,
            });
        }
        bins[j as usize].count += 1;
    }
    Ok(bins)
}

/// Threshold count with its 2*pi-law normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedCount {
    /// `count_at_least(n^(1-delta))`.
    pub raw: u64,
    /// Predicted count `2 pi n^delta / ln^2(n^delta)`.
    pub gamma: f64,
    /// `raw * ln^2(n^delta) / n^delta`; converges in probability to 2*pi.
    pub ratio: f64,
}

pub fn normalized_count(spec: &HoleSpectrum, delta: f64) -> Result<NormalizedCount> {
    let n = spec.n as f64;
    if n.powf(1.0 - delta) < 1.0 {
        return Err(Error::argument(
            "delta",
            format!("n^(1-delta) = {} < 1", n.powf(1.0 - delta)),
        ));
    }
    let scale = n.powf(delta);
    let log2 = scale.ln().powi(2);
    if log2 == 0.0 {
        return Err(Error::argument("delta", "log(n^delta) is zero".to_string()));
    }
    let raw = spec.count_at_least(n.powf(1.0 - delta));
    Ok(NormalizedCount {
        raw,
        gamma: 2.0 * std::f64::consts::PI * scale / log2,
        ratio: raw as f64 * log2 / scale,
    })
}

/// Canonical shape of a hole: its cells translated so the lexicographically
/// first boundary point is the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeKey {
    pub kind: HoleKind,
    /// Sorted cell offsets from the anchor.
    pub cells: Vec<(i32, i32)>,
}

/// Census of translation-equivalence classes over one grid's holes.
pub fn shape_census(grid: &OccupancyGrid, kind: HoleKind) -> HashMap<ShapeKey, u64> {
    let mut census: HashMap<ShapeKey, u64> = HashMap::new();
    match kind {
        HoleKind::Lattice => {
            let mut comps = LatticeComponents::extract(grid);
            for hi in 0..comps.holes().len() {
                let mut cells: Vec<(u32, u32)> = Vec::new();
                comps.0.for_each_cell(hi, |x, y| cells.push((x, y)));
                // Boundary sites are the visited 4-neighbors of hole cells.
                let mut anchor: Option<Point> = None;
                for &(x, y) in &cells {
                    for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                        let nx = (x as i64 + dx) as usize;
                        let ny = (y as i64 + dy) as usize;
                        if grid.is_visited(nx, ny) {
                            let p = grid.to_abs(nx, ny);
                            anchor = Some(match anchor {
                                Some(a) if (a.x, a.y) <= (p.x, p.y) => a,
                                _ => p,
                            });
                        }
                    }
                }
                let anchor = anchor.expect("a bounded hole has visited neighbors");
                push_shape(&mut census, grid, kind, &cells, anchor);
            }
        }
        HoleKind::Planar => {
            let mut comps = PlanarComponents::extract(grid);
            for hi in 0..comps.holes().len() {
                let mut cells: Vec<(u32, u32)> = Vec::new();
                comps.0.for_each_cell(hi, |x, y| cells.push((x, y)));
                // Boundary points are endpoints of traversed edges bordering
                // the hole's faces; the lex-min over closed unit edges is
                // attained at an endpoint.
                let mut anchor: Option<Point> = None;
                for &(fx, fy) in &cells {
                    let (fx, fy) = (fx as usize, fy as usize);
                    let mut consider = |p: Point| {
                        anchor = Some(match anchor {
                            Some(a) if (a.x, a.y) <= (p.x, p.y) => a,
                            _ => p,
                        });
                    };
                    // Bottom, top: h_edges (fx, fy) and (fx, fy+1).
                    if grid.h_edge(fx, fy) {
                        consider(grid.to_abs(fx, fy));
                        consider(grid.to_abs(fx + 1, fy));
                    }
                    if grid.h_edge(fx, fy + 1) {
                        consider(grid.to_abs(fx, fy + 1));
                        consider(grid.to_abs(fx + 1, fy + 1));
                    }
                    // Left, right: v_edges (fx, fy) and (fx+1, fy).
                    if grid.v_edge(fx, fy) {
                        consider(grid.to_abs(fx, fy));
                        consider(grid.to_abs(fx, fy + 1));
                    }
                    if grid.v_edge(fx + 1, fy) {
                        consider(grid.to_abs(fx + 1, fy));
                        consider(grid.to_abs(fx + 1, fy + 1));
                    }
                }
                let anchor = anchor.expect("a bounded hole touches traversed edges");
                push_shape(&mut census, grid, kind, &cells, anchor);
            }
        }
    }
    census
}

fn push_shape(
    census: &mut HashMap<ShapeKey, u64>,
    grid: &OccupancyGrid,
    kind: HoleKind,
    cells: &[(u32, u32)],
    anchor: Point,
) {
    let mut offsets: Vec<(i32, i32)> = cells
        .iter()
        .map(|&(x, y)| {
            let p = grid.to_abs(x as usize, y as usize);
            (p.x - anchor.x, p.y - anchor.y)
        })
        .collect();
    offsets.sort_unstable();
    *census
        .entry(ShapeKey {
            kind,
            cells: offsets,
        })
        .or_insert(0) += 1;
}

/// The canonical key of a single-site lattice hole: its west neighbor is the
/// lex-first boundary site, leaving one cell at offset (1, 0).
pub fn single_site_lattice_key() -> ShapeKey {
    ShapeKey {
        kind: HoleKind::Lattice,
        cells: vec![(1, 0)],
    }
}

/// The canonical key of a single-face planar hole: the anchor is the face's
/// own lower-left corner.
pub fn single_face_planar_key() -> ShapeKey {
    ShapeKey {
        kind: HoleKind::Planar,
        cells: vec![(0, 0)],
    }
}

/// The single-cell shape key of either kind.
pub fn single_cell_key(kind: HoleKind) -> ShapeKey {
    match kind {
        HoleKind::Lattice => single_site_lattice_key(),
        HoleKind::Planar => single_face_planar_key(),
    }
}

/// Merge spectra from disjoint replica sets; associative and
/// order-independent after the canonical sort.
pub fn merge_spectra(parts: &[HoleSpectrum]) -> HoleSpectrum {
    assert!(!parts.is_empty());
    let mut areas = Vec::with_capacity(parts.iter().map(|p| p.areas.len()).sum());
    for p in parts {
        areas.extend_from_slice(&p.areas);
    }
    areas.sort_unstable();
    HoleSpectrum {
        n: parts[0].n,
        kind: parts[0].kind,
        areas,
        replica_id: parts[0].replica_id,
    }
}
