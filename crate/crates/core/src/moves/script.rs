use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::diagram::{CrossingId, CurveDiagram, DiagramError, DiagramJson, ValidationReport};

use super::{apply_move, MoveError, MoveRecord, ReidemeisterMove};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    #[default]
    Curve,
    Point,
}

fn default_version() -> u32 {
    1
}

fn default_surface() -> String {
    "plane".to_string()
}

/// An initial diagram plus one Reidemeister move per level gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopyScript {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default = "default_surface")]
    pub surface: String,
    pub initial: DiagramJson,
    pub moves: Vec<ReidemeisterMove>,
    #[serde(default)]
    pub terminal: Terminal,
}

impl HomotopyScript {
    pub fn new(initial: &CurveDiagram, moves: Vec<ReidemeisterMove>, terminal: Terminal) -> Self {
        HomotopyScript {
            version: 1,
            surface: default_surface(),
            initial: initial.to_json(),
            moves,
            terminal,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serializes")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScriptError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("move {index}: unknown move variant {variant:?}")]
    UnknownMoveVariant { index: usize, variant: String },
    #[error("move {index}: several events in one level gap are not supported")]
    ConcurrentEvents { index: usize },
    #[error("unsupported script version {0}")]
    UnsupportedVersion(u32),
    #[error("unsupported surface {0:?}")]
    UnsupportedSurface(String),
    #[error("initial diagram is invalid: {0}")]
    InvalidInitial(ValidationReport),
    #[error("level {level}: dangling reference to {detail}")]
    DanglingReference { level: usize, detail: String },
    #[error("level {level}: crossing id {id} was already used earlier in the script")]
    IdentifierCollision { level: usize, id: CrossingId },
    #[error("level {level}: {error}")]
    Move { level: usize, error: MoveError },
    #[error("terminal is a point but the last level still has {crossings} crossings")]
    TerminalMismatch { crossings: usize },
}

const MOVE_TYPES: [&str; 5] = ["R1+", "R1-", "R2+", "R2-", "R3"];

/// Parse script JSON strictly, reporting the path of any schema violation.
pub fn parse_script(text: &str) -> Result<HomotopyScript, ScriptError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ScriptError::Schema {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    if let Some(moves) = value.get("moves").and_then(Value::as_array) {
        for (index, m) in moves.iter().enumerate() {
            if m.is_array() {
                return Err(ScriptError::ConcurrentEvents { index });
            }
            if let Some(t) = m.get("type").and_then(Value::as_str) {
                if !MOVE_TYPES.contains(&t) {
                    return Err(ScriptError::UnknownMoveVariant { index, variant: t.to_string() });
                }
            }
        }
    }
    let script: HomotopyScript = serde_path_to_error::deserialize(value).map_err(|e| {
        ScriptError::Schema { path: e.path().to_string(), message: e.inner().to_string() }
    })?;
    if script.version != 1 {
        return Err(ScriptError::UnsupportedVersion(script.version));
    }
    if script.surface != "plane" {
        return Err(ScriptError::UnsupportedSurface(script.surface.clone()));
    }
    Ok(script)
}

/// The diagrams D_0 ... D_n of a script together with per-move bookkeeping.
#[derive(Clone, Debug)]
pub struct ElaboratedScript {
    pub script: HomotopyScript,
    pub levels: Vec<CurveDiagram>,
    /// `records[j]` describes the move from `levels[j]` to `levels[j + 1]`.
    pub records: Vec<MoveRecord>,
}

impl ElaboratedScript {
    pub fn crossing_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|d| d.crossing_count()).collect()
    }

    pub fn last_level(&self) -> usize {
        self.levels.len() - 1
    }
}

pub fn elaborate_script(script: &HomotopyScript) -> Result<ElaboratedScript, ScriptError> {
    let initial = CurveDiagram::from_json(&script.initial).map_err(|e| match e {
        DiagramError::Invalid(r) => ScriptError::InvalidInitial(r),
        other => ScriptError::Schema { path: "initial".into(), message: other.to_string() },
    })?;
    let mut used: BTreeSet<CrossingId> = initial.crossing_ids().into_iter().collect();
    let mut levels = vec![initial];
    let mut records = Vec::new();
    for (level, m) in script.moves.iter().enumerate() {
        for c in m.new_crossings() {
            if !used.insert(c) {
                return Err(ScriptError::IdentifierCollision { level, id: c });
            }
        }
        let outcome = apply_move(levels.last().unwrap(), m).map_err(|error| match error {
            MoveError::OperandMissing(detail) => ScriptError::DanglingReference { level, detail },
            MoveError::IdentifierCollision(id) => ScriptError::IdentifierCollision { level, id },
            error => ScriptError::Move { level, error },
        })?;
        levels.push(outcome.diagram);
        records.push(outcome.record);
    }
    if script.terminal == Terminal::Point {
        let crossings = levels.last().unwrap().crossing_count();
        if crossings != 0 {
            return Err(ScriptError::TerminalMismatch { crossings });
        }
    }
    Ok(ElaboratedScript { script: script.clone(), levels, records })
}
