//! Planar polyline layer: reading curve diagrams off closed polylines,
//! turning keyframe homotopies into move scripts, drawing resolved curves,
//! and rendering SVG.

mod events;
mod extract;
mod realize;
mod schoenflies;
mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{CrossingId, DiagramError};
use crate::gamma::GammaError;
use crate::moves::ScriptError;

pub use events::{detect_events, Detection, Detector, EventKind, EventLogEntry, LevelAnchor};
pub use extract::{extract_diagram, CrossingAnchor, Extracted};
pub use realize::{realize_resolution, shrink_to_point, RadiusPolicy, Realized};
pub use schoenflies::{
    interpolation, realize_trace, render_steps, schoenflies_demo, DemoArtifacts, DemoOptions, Interpolation, RealizedStep,
};
pub use svg::{render_svg, svg_path_points, SvgFrame};

pub type Point = [f64; 2];

/// Tolerance for length comparisons.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("frame is not in generic position: {detail} near ({}, {})", at[0], at[1])]
    NonGenericFrame { detail: String, at: Point },
    #[error("frame has {0} points; at least 3 are required")]
    TooFewPoints(usize),
    #[error("frame repeats point {index}")]
    RepeatedPoint { index: usize },
    #[error("frame times must increase strictly (frame {0})")]
    TimesNotIncreasing(usize),
    #[error("more than one event between frames {0} and {1}; supply finer keyframes")]
    AmbiguousGap(usize, usize),
    #[error("crossings of frames {0} and {1} cannot be matched: {2}")]
    MatchFailure(usize, usize, String),
    #[error("radius {radius} is too large near crossing {crossing}; at most {limit} fits")]
    RadiusTooLarge { crossing: CrossingId, radius: f64, limit: f64 },
    #[error("resolution leaves {0} closed curves")]
    Disconnected(usize),
    #[error("the polygon is not simple")]
    SimplicityViolated,
    #[error("no coordinate anchors for crossing {0}")]
    MissingAnchors(CrossingId),
    #[error("at least 2 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("realized step {step} still has {crossings} crossings")]
    RealizationNotSimple { step: usize, crossings: usize },
    #[error("realized step {step} has length {length}, above the bound")]
    LengthBound { step: usize, length: f64 },
    #[error("epsilon must be positive")]
    BadEpsilon,
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("diagram read off the frame is invalid: {0}")]
    Diagram(#[from] DiagramError),
}

impl GeometryError {
    /// Whether the failure is about the input geometry rather than a broken
    /// internal invariant.
    pub fn is_non_generic(&self) -> bool {
        matches!(
            self,
            GeometryError::NonGenericFrame { .. } | GeometryError::AmbiguousGap(..) | GeometryError::SimplicityViolated
        )
    }
}

/// One closed polyline at time `t`; the last point joins the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolylineFrame {
    pub t: f64,
    pub points: Vec<Point>,
}

impl PolylineFrame {
    pub fn new(t: f64, points: Vec<Point>) -> Self {
        PolylineFrame { t, points }
    }

    pub fn check(&self) -> Result<(), GeometryError> {
        let n = self.points.len();
        if n < 3 {
            return Err(GeometryError::TooFewPoints(n));
        }
        for i in 0..n {
            if self.points[i] == self.points[(i + 1) % n] {
                return Err(GeometryError::RepeatedPoint { index: i });
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        polyline_length(&self.points)
    }

    pub fn segment(&self, i: usize) -> (Point, Point) {
        let n = self.points.len();
        (self.points[i], self.points[(i + 1) % n])
    }
}

pub fn polyline_length(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n).map(|i| dist(points[i], points[(i + 1) % n])).sum()
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Ordered frames with strictly increasing times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolylineHomotopy {
    pub frames: Vec<PolylineFrame>,
}

impl PolylineHomotopy {
    pub fn check(&self) -> Result<(), GeometryError> {
        for (i, f) in self.frames.iter().enumerate() {
            f.check()?;
            if i > 0 && f.t <= self.frames[i - 1].t {
                return Err(GeometryError::TimesNotIncreasing(i));
            }
        }
        Ok(())
    }

    pub fn max_length(&self) -> f64 {
        self.frames.iter().map(PolylineFrame::length).fold(0.0, f64::max)
    }
}

/// Keyframe file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyframesJson {
    #[serde(default = "one")]
    pub version: u32,
    pub frames: Vec<PolylineFrame>,
}

fn one() -> u32 {
    1
}

impl From<KeyframesJson> for PolylineHomotopy {
    fn from(k: KeyframesJson) -> Self {
        PolylineHomotopy { frames: k.frames }
    }
}
