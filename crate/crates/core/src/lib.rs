//! Combinatorial immersed closed curves and the constructions built on them.
//!
//! A curve is stored as a rotation system: every crossing carries four
//! half-edge slots in counterclockwise order, and the curve is the single
//! closed traversal that passes straight through each crossing twice.
//!
//! On top of that model the crate provides Reidemeister move scripts,
//! crossing smoothings, the leveled graph of connected resolutions used to
//! turn a homotopy into an isotopy, the crossing-tracking graph used to halve
//! a contraction of a doubled loop, a planar polyline layer, and brute-force
//! reference implementations for cross-checking.

pub mod corpus;
pub mod diagram;
pub mod gamma;
pub mod geometry;
pub mod halving;
pub mod moves;
pub mod oracle;
pub mod smoothing;

pub use diagram::{ArcId, CrossingId, CurveDiagram, DiagramJson, HalfEdgeId, Passage};
pub use gamma::{IsotopyTrace, ResolutionGraph};
pub use moves::{ElaboratedScript, HomotopyScript, ReidemeisterMove};
pub use smoothing::{Resolution, ResolvedCurve, Sign};
