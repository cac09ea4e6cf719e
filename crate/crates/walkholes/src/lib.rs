//! Simulation and statistics toolkit for the holes of planar simple random
//! walk: seeded walk generation, lattice/planar hole extraction, hole-area
//! spectra and counting-law checks, a Brownian/walk coupling lab, and Monte
//! Carlo disconnection-exponent estimators.
//!
//! Start with the runnable examples (`cargo run --release --example ...`),
//! or the `walkholes` binary for config-driven experiment runs.

pub mod config;
pub mod coupling;
pub mod disconnect;
pub mod error;
pub mod fit;
pub mod grid;
pub mod holes;
pub mod oracle;
pub mod rng;
pub mod runner;
pub mod spectrum;
pub mod walk;

pub use error::{Error, Result};
pub use grid::OccupancyGrid;
pub use holes::{
    boundary_squares, first_enclosure_time, lattice_holes, planar_holes, unbounded_component,
    BoundaryCount, FrontierScope, HoleKind, HoleRecord,
};
pub use walk::{range_stats, Direction, Point, RangeStats, Rect, WalkPath};
