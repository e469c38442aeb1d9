//! Altitude guarding of x-monotone polygonal terrains.
//!
//! Computes the lowest horizontal line that admits `k` guards covering a
//! terrain (ATC), the bijective variant where each guard owns one contiguous
//! subchain (BATC), and brute-force references for both.

#![allow(clippy::needless_range_loop)]

pub mod atc;
pub mod batc;
pub mod envelope;
pub mod gen;
pub mod geom;
pub mod oracles;
pub mod scalar;
pub mod terrain;
pub mod visibility;

pub use atc::{solve, AtcError, AtcMethod, AtcSolution};
pub use batc::{batc_altitude, batc_count, BatcError, BatcPair, BatcSolution};
pub use envelope::AltitudeInterval;
pub use gen::{generate, GenError, Profile};
pub use geom::{line_intersection, orientation, Intersection, Line, Point};
pub use oracles::SampleGrid;
pub use scalar::{ArithmeticMode, Rational, Scalar};
pub use terrain::{parse_terrain, Terrain, TerrainError};
pub use visibility::{
    is_visible, min_guards_at_height, shortest_path_tree, EdgeView, Portion, Root, ShortestPathTree, ViewerInterval,
    Viewers, VisibilityError,
};
