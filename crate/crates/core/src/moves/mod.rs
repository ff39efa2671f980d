//! Reidemeister moves on [`CurveDiagram`]s and homotopy scripts built from them.
//!
//! Moves edit the traversal directly. Surviving crossings keep their ids and
//! slot half-edges, so the crossing correspondence across a move is the
//! identity on survivors. Arcs split by an insertion keep their id on the
//! piece leaving the original passage; arcs merged by a removal keep the id of
//! the piece leaving the surviving passage.

mod candidates;
mod script;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    ArcId, CrossingId, CurveDiagram, DiagramError, Passage, Side, ValidationReport, Violation,
};

pub use candidates::candidate_moves;
pub use script::{elaborate_script, parse_script, ElaboratedScript, HomotopyScript, ScriptError, Terminal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelativeOrientation {
    Parallel,
    Antiparallel,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ReidemeisterMove {
    /// Add a kink on `arc`; the new loop bulges into the face on `side`.
    #[serde(rename = "R1+")]
    R1Plus { arc: ArcId, side: Side, new_crossing: CrossingId },
    #[serde(rename = "R1-")]
    R1Minus { crossing: CrossingId },
    /// Push `arcs[0]` across `arcs[1]` through the face on `side` of
    /// `arcs[0]` (default left). `new_crossings[0]` is met first along `arcs[0]`.
    #[serde(rename = "R2+")]
    R2Plus {
        arcs: [ArcId; 2],
        orientation: RelativeOrientation,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        side: Option<Side>,
        new_crossings: [CrossingId; 2],
    },
    #[serde(rename = "R2-")]
    R2Minus { crossings: [CrossingId; 2] },
    /// Flip the triangle bounded by `face` (its three arc ids).
    #[serde(rename = "R3")]
    R3 { crossings: [CrossingId; 3], face: [ArcId; 3] },
}

impl ReidemeisterMove {
    pub fn crossing_delta(&self) -> i64 {
        match self {
            ReidemeisterMove::R1Plus { .. } => 1,
            ReidemeisterMove::R1Minus { .. } => -1,
            ReidemeisterMove::R2Plus { .. } => 2,
            ReidemeisterMove::R2Minus { .. } => -2,
            ReidemeisterMove::R3 { .. } => 0,
        }
    }

    pub fn new_crossings(&self) -> Vec<CrossingId> {
        match self {
            ReidemeisterMove::R1Plus { new_crossing, .. } => vec![*new_crossing],
            ReidemeisterMove::R2Plus { new_crossings, .. } => new_crossings.to_vec(),
            _ => vec![],
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            ReidemeisterMove::R1Plus { .. } => "R1+",
            ReidemeisterMove::R1Minus { .. } => "R1-",
            ReidemeisterMove::R2Plus { .. } => "R2+",
            ReidemeisterMove::R2Minus { .. } => "R2-",
            ReidemeisterMove::R3 { .. } => "R3",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("operand missing: {0}")]
    OperandMissing(String),
    #[error("face precondition failed: {0}")]
    FacePreconditionFailed(String),
    #[error("crossing id {0} is already in use")]
    IdentifierCollision(CrossingId),
    #[error("move produced an invalid diagram: {0}")]
    InvalidResult(ValidationReport),
}

impl From<DiagramError> for MoveError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::Invalid(r) => MoveError::InvalidResult(r),
            DiagramError::UnknownCrossing(c) => MoveError::OperandMissing(format!("crossing {c}")),
        }
    }
}

/// Bookkeeping for one applied move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub mv: ReidemeisterMove,
    pub created: Vec<CrossingId>,
    pub destroyed: Vec<CrossingId>,
    /// Old crossing to new crossing, for every crossing that survives.
    pub correspondence: BTreeMap<CrossingId, CrossingId>,
    pub created_arcs: Vec<ArcId>,
    pub destroyed_arcs: Vec<ArcId>,
    /// Surviving arc id to the old arcs it absorbed, in traversal order.
    pub merged_arcs: BTreeMap<ArcId, Vec<ArcId>>,
    /// Old arc id to the pieces it was cut into, in traversal order.
    pub split_arcs: BTreeMap<ArcId, Vec<ArcId>>,
}

#[derive(Clone, Debug)]
pub struct MoveOutcome {
    pub diagram: CurveDiagram,
    pub record: MoveRecord,
}

fn arc_pos(d: &CurveDiagram, a: ArcId) -> Result<usize, MoveError> {
    d.arc_position(a).ok_or_else(|| MoveError::OperandMissing(format!("arc {a}")))
}

fn require_crossing(d: &CurveDiagram, c: CrossingId) -> Result<[usize; 2], MoveError> {
    d.visits(c).ok_or_else(|| MoveError::OperandMissing(format!("crossing {c}")))
}

fn require_fresh(d: &CurveDiagram, ids: &[CrossingId]) -> Result<(), MoveError> {
    let mut seen = BTreeSet::new();
    for c in ids {
        if d.has_crossing(*c) || !seen.insert(*c) {
            return Err(MoveError::IdentifierCollision(*c));
        }
    }
    Ok(())
}

/// Apply one move, validating operands, face preconditions and the result.
pub fn apply_move(d: &CurveDiagram, m: &ReidemeisterMove) -> Result<MoveOutcome, MoveError> {
    match m {
        ReidemeisterMove::R1Plus { arc, side, new_crossing } => {
            let k = arc_pos(d, *arc)?;
            require_fresh(d, &[*new_crossing])?;
            let second = match side {
                Side::Left => 3,
                Side::Right => 1,
            };
            let new = [Passage::new(*new_crossing, 0), Passage::new(*new_crossing, second)];
            insert(d, m, &[(k, &new)])
        }
        ReidemeisterMove::R1Minus { crossing } => {
            let [p, q] = require_crossing(d, *crossing)?;
            let n = d.passages().len();
            let loop_pos = if q == p + 1 {
                p
            } else if p == 0 && q == n - 1 {
                n - 1
            } else {
                return Err(MoveError::FacePreconditionFailed(format!(
                    "crossing {crossing} does not bound a monogon"
                )));
            };
            let loop_arc = d.arcs()[loop_pos];
            let faces = d.faces();
            let monogon = [Side::Left, Side::Right].iter().any(|s| {
                faces.face_of(loop_arc, *s).map(|f| faces.faces[f].len()) == Some(1)
            });
            if !monogon {
                return Err(MoveError::FacePreconditionFailed(format!(
                    "crossing {crossing} does not bound a monogon"
                )));
            }
            remove(d, m, &[*crossing])
        }
        ReidemeisterMove::R2Plus { arcs, orientation, side, new_crossings } => {
            let [a, b] = *arcs;
            let ka = arc_pos(d, a)?;
            let kb = arc_pos(d, b)?;
            require_fresh(d, new_crossings)?;
            let side = side.unwrap_or(Side::Left);
            let anti = *orientation == RelativeOrientation::Antiparallel;
            if a == b && !anti {
                return Err(MoveError::FacePreconditionFailed(
                    "an arc can only be pushed across itself antiparallel".into(),
                ));
            }
            let side_b = if anti { side } else { side.opposite() };
            let faces = d.faces();
            if faces.face_of(a, side) != faces.face_of(b, side_b) {
                return Err(MoveError::FacePreconditionFailed(format!(
                    "arcs {a} and {b} do not share a face on the requested sides"
                )));
            }
            // slot labels around each new crossing, seen from arc a
            let (east, north, west, south) = match side {
                Side::Right => (0, 1, 2, 3),
                Side::Left => (0, 3, 2, 1),
            };
            let [c1, c2] = *new_crossings;
            let a_pass = [Passage::new(c1, north), Passage::new(c2, south)];
            let b_pass = if anti {
                [Passage::new(c2, east), Passage::new(c1, east)]
            } else {
                [Passage::new(c1, west), Passage::new(c2, west)]
            };
            if ka == kb {
                let both = [a_pass[0], a_pass[1], b_pass[0], b_pass[1]];
                insert(d, m, &[(ka, &both)])
            } else {
                insert(d, m, &[(ka, &a_pass), (kb, &b_pass)])
            }
        }
        ReidemeisterMove::R2Minus { crossings } => {
            let [c1, c2] = *crossings;
            require_crossing(d, c1)?;
            require_crossing(d, c2)?;
            if c1 == c2 {
                return Err(MoveError::FacePreconditionFailed("R2- needs two crossings".into()));
            }
            if bigon_arcs(d, c1, c2).is_none() {
                return Err(MoveError::FacePreconditionFailed(format!(
                    "crossings {c1} and {c2} do not bound a bigon"
                )));
            }
            remove(d, m, &[c1, c2])
        }
        ReidemeisterMove::R3 { crossings, face } => {
            for c in crossings {
                require_crossing(d, *c)?;
            }
            let mut positions = Vec::new();
            for a in face {
                positions.push(arc_pos(d, *a)?);
            }
            let triple: BTreeSet<CrossingId> = crossings.iter().copied().collect();
            let faces = d.faces();
            let is_triangle = faces.faces.iter().any(|f| {
                f.len() == 3 && f.crossings() == triple && {
                    let arcs: BTreeSet<ArcId> = f.sides.iter().map(|s| s.0).collect();
                    arcs == face.iter().copied().collect()
                }
            });
            if triple.len() != 3 || !is_triangle {
                return Err(MoveError::FacePreconditionFailed(
                    "crossings and arcs do not bound a triangle".into(),
                ));
            }
            let n = d.passages().len();
            let mut passages = d.passages().to_vec();
            for &k in &positions {
                passages.swap(k, (k + 1) % n);
            }
            let mut next = CurveDiagram::from_traversal(
                d.crossing_map().clone(),
                passages,
                d.arcs().to_vec(),
                d.genus(),
                d.counters(),
            )?;
            next.rotate_to(d.arcs()[0]);
            let correspondence = crossings.iter().map(|c| (*c, *c)).collect::<BTreeMap<_, _>>();
            let mut full = identity_on(d, &[]);
            full.extend(correspondence);
            Ok(MoveOutcome {
                diagram: next,
                record: MoveRecord {
                    mv: m.clone(),
                    created: vec![],
                    destroyed: vec![],
                    correspondence: full,
                    created_arcs: vec![],
                    destroyed_arcs: vec![],
                    merged_arcs: BTreeMap::new(),
                    split_arcs: BTreeMap::new(),
                },
            })
        }
    }
}

/// The two arcs of a bigon face with corners at `c1` and `c2`, if any.
pub fn bigon_arcs(d: &CurveDiagram, c1: CrossingId, c2: CrossingId) -> Option<[ArcId; 2]> {
    let faces = d.faces();
    let want: BTreeSet<CrossingId> = [c1, c2].into_iter().collect();
    faces.faces.iter().find_map(|f| {
        if f.len() == 2 && f.darts.len() == 2 && f.crossings() == want && f.sides[0].0 != f.sides[1].0 {
            Some([f.sides[0].0, f.sides[1].0])
        } else {
            None
        }
    })
}

fn identity_on(d: &CurveDiagram, removed: &[CrossingId]) -> BTreeMap<CrossingId, CrossingId> {
    d.crossing_ids()
        .into_iter()
        .filter(|c| !removed.contains(c))
        .map(|c| (c, c))
        .collect()
}

/// Insert passage runs after the given traversal positions.
fn insert(
    d: &CurveDiagram,
    m: &ReidemeisterMove,
    runs: &[(usize, &[Passage])],
) -> Result<MoveOutcome, MoveError> {
    let mut scratch = d.clone();
    let mut crossings = d.crossing_map().clone();
    let created = m.new_crossings();
    for c in &created {
        crossings.insert(*c, scratch.fresh_half_edges::<4>());
    }
    let mut created_arcs = Vec::new();
    let mut split_arcs = BTreeMap::new();
    let (passages, arcs) = if d.is_free_loop() {
        let run: Vec<Passage> = runs.iter().flat_map(|(_, r)| r.iter().copied()).collect();
        let old = d.arcs()[0];
        let mut arcs: Vec<ArcId> = (0..run.len() - 1).map(|_| scratch.fresh_arc()).collect();
        created_arcs.extend(arcs.iter().copied());
        arcs.push(old);
        let mut pieces = vec![old];
        pieces.extend(arcs[..arcs.len() - 1].iter().copied());
        split_arcs.insert(old, pieces);
        (run, arcs)
    } else {
        let mut passages = d.passages().to_vec();
        let mut arcs = d.arcs().to_vec();
        let mut order: Vec<&(usize, &[Passage])> = runs.iter().collect();
        order.sort_by(|x, y| y.0.cmp(&x.0));
        for (k, run) in order {
            let fresh: Vec<ArcId> = run.iter().map(|_| scratch.fresh_arc()).collect();
            let mut pieces = vec![arcs[*k]];
            pieces.extend(fresh.iter().copied());
            split_arcs.insert(arcs[*k], pieces);
            created_arcs.extend(fresh.iter().copied());
            passages.splice(k + 1..k + 1, run.iter().copied());
            arcs.splice(k + 1..k + 1, fresh);
        }
        (passages, arcs)
    };
    created_arcs.sort();
    let mut next =
        CurveDiagram::from_traversal(crossings, passages, arcs, d.genus(), scratch.counters())?;
    next.rotate_to(d.arcs()[0]);
    Ok(MoveOutcome {
        diagram: next,
        record: MoveRecord {
            mv: m.clone(),
            created,
            destroyed: vec![],
            correspondence: identity_on(d, &[]),
            created_arcs,
            destroyed_arcs: vec![],
            merged_arcs: BTreeMap::new(),
            split_arcs,
        },
    })
}

/// Delete every passage through `removed` and merge the arcs around them.
fn remove(
    d: &CurveDiagram,
    m: &ReidemeisterMove,
    removed: &[CrossingId],
) -> Result<MoveOutcome, MoveError> {
    let n = d.passages().len();
    let survivors: Vec<usize> =
        (0..n).filter(|&i| !removed.contains(&d.passages()[i].crossing)).collect();
    let mut crossings = d.crossing_map().clone();
    for c in removed {
        crossings.remove(c);
    }
    let mut merged_arcs = BTreeMap::new();
    let next = if survivors.is_empty() {
        let mut scratch = d.clone();
        let keep = d.arcs()[0];
        let ends = scratch.fresh_half_edges::<2>();
        merged_arcs.insert(keep, rotated(d.arcs(), 0));
        if d.genus() != 0 {
            return Err(MoveError::InvalidResult(ValidationReport {
                violations: vec![Violation::EulerMismatch {
                    vertices: 1,
                    edges: 1,
                    faces: 2,
                    expected: 2 - 2 * d.genus() as i64,
                }],
            }));
        }
        let mut loop_d = CurveDiagram::free_loop(keep, ends, d.genus());
        loop_d.bump_counters(scratch.counters());
        loop_d
    } else {
        let passages: Vec<Passage> = survivors.iter().map(|&i| d.passages()[i]).collect();
        let mut arcs = Vec::new();
        for (j, &i) in survivors.iter().enumerate() {
            let stop = survivors[(j + 1) % survivors.len()];
            let mut chain = vec![d.arcs()[i]];
            let mut k = (i + 1) % n;
            while k != stop {
                chain.push(d.arcs()[k]);
                k = (k + 1) % n;
            }
            arcs.push(d.arcs()[i]);
            if chain.len() > 1 {
                merged_arcs.insert(d.arcs()[i], chain);
            }
        }
        let mut next =
            CurveDiagram::from_traversal(crossings, passages, arcs, d.genus(), d.counters())?;
        let base = d.arcs()[0];
        if next.arc_position(base).is_some() {
            next.rotate_to(base);
        } else {
            let lowest = *next.arcs().iter().min().unwrap();
            next.rotate_to(lowest);
        }
        next
    };
    let surviving: BTreeSet<ArcId> = next.arcs().iter().copied().collect();
    let destroyed_arcs: Vec<ArcId> =
        d.arcs().iter().copied().filter(|a| !surviving.contains(a)).collect::<BTreeSet<_>>().into_iter().collect();
    let mut destroyed = removed.to_vec();
    destroyed.sort();
    Ok(MoveOutcome {
        diagram: next,
        record: MoveRecord {
            mv: m.clone(),
            created: vec![],
            destroyed,
            correspondence: identity_on(d, removed),
            created_arcs: vec![],
            destroyed_arcs,
            merged_arcs,
            split_arcs: BTreeMap::new(),
        },
    })
}

fn rotated(arcs: &[ArcId], k: usize) -> Vec<ArcId> {
    let mut v = arcs.to_vec();
    v.rotate_left(k);
    v
}

#[cfg(test)]
pub(crate) mod tests;
