//! Exit codes. 0 success, 2 bad input, 3 degenerate geometry, 4 an invariant
//! failed on this instance.

use std::fmt;

use curve_homotopy::gamma::GammaError;
use curve_homotopy::geometry::GeometryError;
use curve_homotopy::halving::HalvingError;
use curve_homotopy::moves::ScriptError;
use curve_homotopy::smoothing::SmoothingError;

pub const INPUT: u8 = 2;
pub const GEOMETRY: u8 = 3;
pub const INVARIANT: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl fmt::Display) -> Self {
        Failure { code, message: message.to_string() }
    }

    pub fn input(message: impl fmt::Display) -> Self {
        Failure::new(INPUT, message)
    }

    pub fn invariant(message: impl fmt::Display) -> Self {
        Failure::new(INVARIANT, message)
    }
}

impl From<ScriptError> for Failure {
    fn from(e: ScriptError) -> Self {
        Failure::input(e)
    }
}

impl From<SmoothingError> for Failure {
    fn from(e: SmoothingError) -> Self {
        match e {
            SmoothingError::CapExceeded { .. } => Failure::input(e),
            SmoothingError::ArcUniverseMismatch => Failure::invariant(e),
        }
    }
}

impl From<GammaError> for Failure {
    fn from(e: GammaError) -> Self {
        match e {
            GammaError::NonSimpleInitial(_) => Failure::input(e),
            GammaError::Smoothing(s) => s.into(),
            _ => Failure::invariant(e),
        }
    }
}

impl From<HalvingError> for Failure {
    fn from(e: HalvingError) -> Self {
        match e {
            HalvingError::NotAContraction(_) | HalvingError::InitialMismatch | HalvingError::Invalid(_) => {
                Failure::input(e)
            }
            HalvingError::DegreeViolation { .. }
            | HalvingError::NonTermination { .. }
            | HalvingError::SideInconsistency { .. } => Failure::invariant(e),
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        use GeometryError::*;
        match e {
            Gamma(g) => g.into(),
            Script(s) => s.into(),
            NonGenericFrame { .. } | RepeatedPoint { .. } | AmbiguousGap(..) | MatchFailure(..) => {
                Failure::new(GEOMETRY, e)
            }
            RealizationNotSimple { .. } | LengthBound { .. } | Disconnected(_) | MissingAnchors(_) => {
                Failure::invariant(e)
            }
            _ => Failure::input(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e)
    }
}
