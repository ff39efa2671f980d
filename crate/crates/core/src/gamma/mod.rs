//! The leveled graph of admissible resolutions and the isotopy extracted
//! from it.
//!
//! Vertices at level `j` are the admissible resolutions of `D_j`. Edges
//! record the crossing-free substitutes for each Reidemeister move: kink
//! removal (`M1*`), separable bigon removal (`M2a*`), the double sign flip on
//! a trapped bigon (`M2b`), and the triangle correspondences (`M3*`).

mod local;
mod trace;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::CrossingId;
use crate::moves::{ElaboratedScript, ReidemeisterMove};
use crate::oracle::OracleGraph;
use crate::smoothing::{component_count, enumerate_admissible, Resolution, Sign, SmoothingError};

pub use local::{
    classify_bigon, local_matching, local_r3_matchings, BigonClass, LocalMatching, R3Matchings,
    ALL_TRIPLES,
};
pub use trace::{
    find_isotopy_path, verify_trace, IsotopyTrace, Orientation, TraceStep, TraceViolation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error("crossings {0} and {1} do not bound a bigon")]
    NotABigon(CrossingId, CrossingId),
    #[error("the crossings and arcs do not bound a triangle on both sides of the move")]
    NotATriangle,
    #[error("a resolution leaves a crossing of the region unassigned")]
    UnassignedCrossing,
    #[error("fan count violation: {0}")]
    FanCountViolation(String),
    #[error("level {level}: fan count violation: {detail}")]
    FanCountAtLevel { level: usize, detail: String },
    #[error("the initial curve has {0} crossings; a simple initial curve is required")]
    NonSimpleInitial(usize),
    #[error("no path from the start vertex reaches the last level")]
    NoPathFound,
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeLabel {
    M1Plus,
    M1Minus,
    M2aPlus,
    M2aMinus,
    M2b,
    M3a,
    M3bPlus,
    M3bMinus,
}

impl EdgeLabel {
    pub fn is_horizontal(self) -> bool {
        self == EdgeLabel::M2b
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaVertex {
    pub level: usize,
    pub resolution: Resolution,
}

/// A multi-edge. Vertical edges have `lower` at level `j` and `upper` at
/// level `j + 1`; horizontal edges join two vertices of one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaEdge {
    pub lower: usize,
    pub upper: usize,
    pub label: EdgeLabel,
    pub multiplicity: u32,
}

#[derive(Clone, Debug)]
pub struct ResolutionGraph {
    pub vertices: Vec<GammaVertex>,
    pub edges: Vec<GammaEdge>,
    index: BTreeMap<(usize, Resolution), usize>,
    incident: Vec<Vec<usize>>,
    pub level_count: usize,
}

impl ResolutionGraph {
    pub fn vertex(&self, level: usize, r: &Resolution) -> Option<usize> {
        self.index.get(&(level, r.clone())).copied()
    }

    pub fn vertices_at(&self, level: usize) -> Vec<usize> {
        self.index
            .range((level, Resolution::empty())..)
            .take_while(|((l, _), _)| *l == level)
            .map(|(_, v)| *v)
            .collect()
    }

    /// Degree counting multiplicities; self-loops would count twice.
    pub fn degree(&self, v: usize) -> u32 {
        self.incident[v]
            .iter()
            .map(|&e| {
                let edge = &self.edges[e];
                edge.multiplicity * if edge.lower == edge.upper { 2 } else { 1 }
            })
            .sum()
    }

    /// Edge ids touching `v`, ordered by the neighbour's key then label.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let edge = &self.edges[e];
        if edge.lower == v {
            edge.upper
        } else {
            edge.lower
        }
    }

    pub fn key(&self, v: usize) -> (usize, Vec<Sign>) {
        let vx = &self.vertices[v];
        (vx.level, vx.resolution.sign_vector())
    }

    /// The graph with each multi-edge expanded into parallel plain edges.
    pub fn to_oracle_graph(&self) -> OracleGraph {
        let mut g = OracleGraph { vertex_count: self.vertices.len(), edges: vec![] };
        for e in &self.edges {
            for _ in 0..e.multiplicity {
                g.edges.push((e.lower, e.upper, format!("{:?}", e.label)));
            }
        }
        g
    }

    pub fn start(&self) -> Option<usize> {
        self.vertex(0, &Resolution::empty())
    }

    pub fn targets(&self) -> BTreeSet<usize> {
        self.vertices_at(self.level_count - 1).into_iter().collect()
    }

    /// Diagnostic adjacency dump.
    pub fn dump(&self) -> serde_json::Value {
        let vertices: Vec<_> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                serde_json::json!({
                    "id": i,
                    "level": v.level,
                    "resolution": v.resolution,
                    "degree": self.degree(i),
                })
            })
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                serde_json::json!({
                    "from": e.lower, "to": e.upper, "label": e.label, "multiplicity": e.multiplicity
                })
            })
            .collect();
        serde_json::json!({ "vertices": vertices, "edges": edges })
    }
}

struct EdgeSet {
    edges: BTreeMap<(usize, usize, EdgeLabel), u32>,
}

impl EdgeSet {
    fn add(&mut self, a: usize, b: usize, label: EdgeLabel, multiplicity: u32) {
        *self.edges.entry((a, b, label)).or_default() += multiplicity;
    }
}

/// The sign at a fresh kink crossing that keeps the smoothing connected.
fn kink_sign(d: &crate::CurveDiagram, r: &Resolution, c: CrossingId) -> Option<Sign> {
    [Sign::Positive, Sign::Negative].into_iter().find(|s| component_count(d, &r.with(c, *s)) == 1)
}

/// Build the graph over every level of an elaborated script.
pub fn build_gamma(s: &ElaboratedScript, cap: usize) -> Result<ResolutionGraph, GammaError> {
    let mut vertices = Vec::new();
    let mut index = BTreeMap::new();
    for (level, d) in s.levels.iter().enumerate() {
        for r in enumerate_admissible(d, cap)? {
            index.insert((level, r.clone()), vertices.len());
            vertices.push(GammaVertex { level, resolution: r });
        }
    }
    let find = |level: usize, r: &Resolution| index.get(&(level, r.clone())).copied();
    let mut edges = EdgeSet { edges: BTreeMap::new() };

    for (j, record) in s.records.iter().enumerate() {
        let (lower, upper) = (&s.levels[j], &s.levels[j + 1]);
        match &record.mv {
            ReidemeisterMove::R1Plus { new_crossing, .. } => {
                for (key, &v) in index.range((j, Resolution::empty())..) {
                    if key.0 != j {
                        break;
                    }
                    if let Some(sign) = kink_sign(upper, &key.1, *new_crossing) {
                        if let Some(w) = find(j + 1, &key.1.with(*new_crossing, sign)) {
                            edges.add(v, w, EdgeLabel::M1Plus, 1);
                        }
                    }
                }
            }
            ReidemeisterMove::R1Minus { crossing } => {
                for (key, &w) in index.range((j + 1, Resolution::empty())..) {
                    if key.0 != j + 1 {
                        break;
                    }
                    if let Some(sign) = kink_sign(lower, &key.1, *crossing) {
                        if let Some(v) = find(j, &key.1.with(*crossing, sign)) {
                            edges.add(v, w, EdgeLabel::M1Minus, 1);
                        }
                    }
                }
            }
            ReidemeisterMove::R2Plus { new_crossings: [c1, c2], .. } => {
                bigon_edges(&mut edges, &index, upper, j + 1, j, *c1, *c2, true)?;
            }
            ReidemeisterMove::R2Minus { crossings: [c1, c2] } => {
                bigon_edges(&mut edges, &index, lower, j, j + 1, *c1, *c2, false)?;
            }
            ReidemeisterMove::R3 { crossings, face } => {
                let m = local_r3_matchings(lower, upper, *crossings, *face).map_err(|e| match e {
                    GammaError::FanCountViolation(detail) => GammaError::FanCountAtLevel { level: j, detail },
                    other => other,
                })?;
                let with_triple = |r: &Resolution, signs: [Sign; 3]| {
                    let mut r = r.clone();
                    for (c, s) in crossings.iter().zip(signs) {
                        r.set(*c, s);
                    }
                    r
                };
                for (key, &v) in index.range((j, Resolution::empty())..) {
                    if key.0 != j {
                        break;
                    }
                    let local: [Sign; 3] = std::array::from_fn(|i| key.1.get(crossings[i]).unwrap());
                    let mut targets = Vec::new();
                    if let Some((_, after)) = m.one_to_one.iter().find(|(b, _)| *b == local) {
                        targets.push((*after, EdgeLabel::M3a));
                    }
                    if let Some((b, afters)) = &m.fan_forward {
                        if *b == local {
                            targets.extend(afters.iter().map(|a| (*a, EdgeLabel::M3bPlus)));
                        }
                    }
                    if let Some((befores, after)) = &m.fan_backward {
                        if befores.contains(&local) {
                            targets.push((*after, EdgeLabel::M3bMinus));
                        }
                    }
                    for (after, label) in targets {
                        if let Some(w) = find(j + 1, &with_triple(&key.1, after)) {
                            edges.add(v, w, label, 1);
                        }
                    }
                }
            }
        }
    }

    let edges: Vec<GammaEdge> = edges
        .edges
        .into_iter()
        .map(|((lower, upper, label), multiplicity)| GammaEdge { lower, upper, label, multiplicity })
        .collect();
    let mut incident = vec![Vec::new(); vertices.len()];
    for (i, e) in edges.iter().enumerate() {
        incident[e.lower].push(i);
        if e.upper != e.lower {
            incident[e.upper].push(i);
        }
    }
    let level_count = s.levels.len();
    let mut g = ResolutionGraph { vertices, edges, index, incident, level_count };
    let mut incident = std::mem::take(&mut g.incident);
    for (v, list) in incident.iter_mut().enumerate() {
        list.sort_by_key(|&e| (g.key(g.other_end(e, v)), g.edges[e].label));
    }
    g.incident = incident;
    Ok(g)
}

/// Edges for a bigon that exists at `bigon_level` and not at `bare_level`.
#[allow(clippy::too_many_arguments)]
fn bigon_edges(
    edges: &mut EdgeSet,
    index: &BTreeMap<(usize, Resolution), usize>,
    with_bigon: &crate::CurveDiagram,
    bigon_level: usize,
    bare_level: usize,
    c1: CrossingId,
    c2: CrossingId,
    created: bool,
) -> Result<(), GammaError> {
    let vertical = if created { EdgeLabel::M2aPlus } else { EdgeLabel::M2aMinus };
    let find = |level: usize, r: &Resolution| index.get(&(level, r.clone())).copied();
    let mut horizontal = BTreeSet::new();
    for (key, &v) in index.range((bigon_level, Resolution::empty())..) {
        if key.0 != bigon_level {
            break;
        }
        let r = &key.1;
        match classify_bigon(with_bigon, c1, c2, r)? {
            BigonClass::Separable => {
                let bare = r.without(c1).without(c2);
                if let Some(w) = find(bare_level, &bare) {
                    if created {
                        edges.add(w, v, vertical, 1);
                    } else {
                        edges.add(v, w, vertical, 1);
                    }
                }
            }
            BigonClass::Trapped => {
                let flipped = r
                    .with(c1, r.get(c1).unwrap().flipped())
                    .with(c2, r.get(c2).unwrap().flipped());
                if let Some(w) = find(bigon_level, &flipped) {
                    horizontal.insert((v.min(w), v.max(w)));
                }
            }
            BigonClass::Mixed => {}
        }
    }
    for (a, b) in horizontal {
        edges.add(a, b, EdgeLabel::M2b, 1);
    }
    Ok(())
}

/// Interior vertices whose degree is odd or outside {2, 4, 6}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    pub offenders: Vec<(usize, String, u32)>,
    pub degree_histogram: BTreeMap<u32, usize>,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.offenders.is_empty()
    }
}

pub fn check_parity(g: &ResolutionGraph) -> ParityReport {
    let mut report = ParityReport::default();
    for (v, vx) in g.vertices.iter().enumerate() {
        if vx.level == 0 || vx.level + 1 >= g.level_count {
            continue;
        }
        let deg = g.degree(v);
        *report.degree_histogram.entry(deg).or_default() += 1;
        if ![2, 4, 6].contains(&deg) {
            report.offenders.push((vx.level, vx.resolution.to_string(), deg));
        }
    }
    report
}

#[cfg(test)]
mod tests;
