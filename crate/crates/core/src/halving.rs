//! Halving a contraction of a doubled loop.
//!
//! A curve `alpha` traversed twice is pushed off itself into `beta`: the first
//! half runs along `alpha`, the second half runs along a copy offset to the
//! left, and the two halves swap at one base crossing. Given a contraction of
//! `beta`, the tracking graph follows self-intersections through the moves.
//! The trail from the base crossing yields a homotopy of the first half
//! through subcurves.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    ArcId, ArcJson, CrossingId, CrossingJson, CurveDiagram, DiagramError, DiagramJson, HalfEdgeId,
    Passage,
};
use crate::moves::{bigon_arcs, ElaboratedScript, ReidemeisterMove, Terminal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HalvingError {
    #[error("vertex at level {level} ({}) has degree {degree}, expected 2", describe(*crossing))]
    DegreeViolation { level: usize, crossing: Option<CrossingId>, degree: usize },
    #[error("walk did not reach a terminal vertex within {steps} steps")]
    NonTermination { steps: usize },
    #[error("side bijection at level {level} contradicts arc continuity: {detail}")]
    SideInconsistency { level: usize, detail: String },
    #[error("the script is not a contraction: {0}")]
    NotAContraction(String),
    #[error("the script's initial curve is not the doubled curve")]
    InitialMismatch,
    #[error("doubled curve is invalid: {0}")]
    Invalid(#[from] DiagramError),
}

fn describe(c: Option<CrossingId>) -> String {
    match c {
        Some(c) => format!("crossing {c}"),
        None => "empty vertex".into(),
    }
}

/// The four crossings of `beta` near one crossing of `alpha`. With `A` the
/// original copy and `B` the offset copy, and the branches numbered by visit
/// order: `[A×A, B×B, A1×B2, B1×A2]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub alpha_crossing: CrossingId,
    pub crossings: [CrossingId; 4],
}

#[derive(Clone, Debug)]
pub struct DoubledCurve {
    pub alpha: CurveDiagram,
    pub beta: CurveDiagram,
    pub clusters: Vec<Cluster>,
    pub base: CrossingId,
    /// Passage index in `beta` where the first half leaves the base crossing.
    first_half_start: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sheet {
    Original,
    Offset,
}

/// Push `alpha` off itself and join the two copies at one base crossing.
pub fn perturb_double(alpha: &CurveDiagram) -> Result<DoubledCurve, HalvingError> {
    let passages = alpha.passages();
    let ids = alpha.crossing_ids();
    let rank: BTreeMap<CrossingId, u32> = ids.iter().enumerate().map(|(r, c)| (*c, r as u32)).collect();
    let base = CrossingId(1);
    let cluster_id = |c: CrossingId, first: Sheet, second: Sheet| {
        let t = match (first, second) {
            (Sheet::Original, Sheet::Original) => 0,
            (Sheet::Offset, Sheet::Offset) => 1,
            (Sheet::Original, Sheet::Offset) => 2,
            (Sheet::Offset, Sheet::Original) => 3,
        };
        CrossingId(2 + 4 * rank[&c] + t)
    };

    let mut seq = Vec::new();
    for (copy, base_entry) in [(Sheet::Original, 1), (Sheet::Offset, 2)] {
        seq.push(Passage::new(base, base_entry));
        for (k, p) in passages.iter().enumerate() {
            let [v0, v1] = alpha.visits(p.crossing).expect("crossing of alpha");
            let other = passages[if k == v0 { v1 } else { v0 }];
            // the offset copy of the other strand lies on its left; meet the
            // nearer line first
            let order = if other.entry == (p.entry + 1) % 4 {
                [Sheet::Offset, Sheet::Original]
            } else {
                [Sheet::Original, Sheet::Offset]
            };
            for o in order {
                let id = if k == v0 {
                    cluster_id(p.crossing, copy, o)
                } else {
                    cluster_id(p.crossing, o, copy)
                };
                seq.push(Passage::new(id, p.entry));
            }
        }
    }

    let half_edge = |c: CrossingId, slot: u8| HalfEdgeId(4 * c.0 + slot as u32);
    let mut crossing_ids: BTreeSet<CrossingId> = seq.iter().map(|p| p.crossing).collect();
    crossing_ids.insert(base);
    let crossings = crossing_ids
        .iter()
        .map(|&c| CrossingJson { id: c, slots: (0..4).map(|s| half_edge(c, s)).collect() })
        .collect();
    let n = seq.len();
    let arcs: Vec<ArcJson> = (0..n)
        .map(|i| {
            let (from, to) = (seq[i], seq[(i + 1) % n]);
            ArcJson {
                id: ArcId(i as u32 + 1),
                ends: [half_edge(from.crossing, from.exit()), half_edge(to.crossing, to.entry)],
            }
        })
        .collect();
    let json = DiagramJson {
        basepoint: arcs[0].ends[0],
        crossings,
        arcs,
        genus: alpha.genus(),
    };
    let beta = CurveDiagram::from_json(&json)?;
    let clusters = ids
        .iter()
        .map(|&c| Cluster {
            alpha_crossing: c,
            crossings: [
                cluster_id(c, Sheet::Original, Sheet::Original),
                cluster_id(c, Sheet::Offset, Sheet::Offset),
                cluster_id(c, Sheet::Original, Sheet::Offset),
                cluster_id(c, Sheet::Offset, Sheet::Original),
            ],
        })
        .collect();
    let mut dc = DoubledCurve { alpha: alpha.clone(), beta, clusters, base, first_half_start: 0 };
    dc.first_half_start = dc.locate_first_half()?;
    Ok(dc)
}

impl DoubledCurve {
    /// The visit of the base crossing after which the original copy runs:
    /// the half containing both visits of every `A×A` crossing.
    fn locate_first_half(&self) -> Result<usize, HalvingError> {
        let [v0, v1] = self.beta.visits(self.base).ok_or(HalvingError::InitialMismatch)?;
        let half = self.beta.passages().len() / 2;
        let n = 2 * half;
        for start in [v0, v1] {
            let inside = |c: CrossingId| {
                let [a, b] = self.beta.visits(c).unwrap();
                let rel = |x: usize| (x + n - start) % n;
                rel(a) < half && rel(b) < half
            };
            if self.clusters.iter().all(|cl| inside(cl.crossings[0]) && !inside(cl.crossings[1])) {
                return Ok(start);
            }
        }
        Err(HalvingError::InitialMismatch)
    }

    /// Arcs of the first half, `beta([0, 1/2])`.
    pub fn first_half_arcs(&self) -> BTreeSet<ArcId> {
        let arcs = self.beta.arcs();
        let n = arcs.len();
        (0..n / 2).map(|i| arcs[(self.first_half_start + i) % n]).collect()
    }

    /// The arc correspondence induced by sliding each half onto the other,
    /// which is what pushing the first half off instead of the second does.
    pub fn half_swap(&self) -> BTreeMap<ArcId, ArcId> {
        let arcs = self.beta.arcs();
        let n = arcs.len();
        (0..n)
            .map(|i| {
                let at = (self.first_half_start + i) % n;
                (arcs[at], arcs[(at + n / 2) % n])
            })
            .collect()
    }

    /// Arcs joining the two crossings met in a row where one strand of a
    /// copy passes a crossing of `alpha`. Sliding the halves onto each other
    /// moves their endpoints past each other, so only the remaining arcs are
    /// carried exactly.
    pub fn cluster_internal_arcs(&self) -> BTreeSet<ArcId> {
        let arcs = self.beta.arcs();
        let n = arcs.len();
        let half = n / 2;
        (0..n)
            .filter(|i| (i % half) % 2 == 1)
            .map(|i| arcs[(self.first_half_start + i) % n])
            .collect()
    }

    /// The same doubled curve with `beta` replaced by an isomorphic copy
    /// under other identifiers.
    pub fn rebase(&self, beta: &CurveDiagram) -> Result<DoubledCurve, HalvingError> {
        if *beta == self.beta {
            return Ok(self.clone());
        }
        for map in self.beta.isomorphisms(beta, false) {
            let m = |c: CrossingId| map.get(&c).copied().unwrap_or(c);
            let mut dc = DoubledCurve {
                alpha: self.alpha.clone(),
                beta: beta.clone(),
                clusters: self
                    .clusters
                    .iter()
                    .map(|cl| Cluster { alpha_crossing: cl.alpha_crossing, crossings: cl.crossings.map(m) })
                    .collect(),
                base: m(self.base),
                first_half_start: 0,
            };
            if let Ok(start) = dc.locate_first_half() {
                dc.first_half_start = start;
                return Ok(dc);
            }
        }
        Err(HalvingError::InitialMismatch)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrackEdgeLabel {
    Continuation,
    R1Link,
    R2Horizontal,
    BetaExtra,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TrackVertex {
    pub level: usize,
    /// `None` is the empty self-intersection of the level.
    pub crossing: Option<CrossingId>,
}

/// An edge with its side bijection: side `s` at `a` corresponds to side `s`
/// at `b`, or to the other side when `swap` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrackEdge {
    pub a: usize,
    pub b: usize,
    pub label: TrackEdgeLabel,
    pub swap: bool,
}

#[derive(Clone, Debug)]
pub struct CrossingTrackGraph {
    pub vertices: Vec<TrackVertex>,
    pub edges: Vec<TrackEdge>,
    pub terminal: BTreeSet<usize>,
    pub start: usize,
    index: BTreeMap<TrackVertex, usize>,
    incident: Vec<Vec<usize>>,
}

impl CrossingTrackGraph {
    pub fn vertex(&self, level: usize, crossing: Option<CrossingId>) -> Option<usize> {
        self.index.get(&TrackVertex { level, crossing }).copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    fn other_end(&self, e: usize, v: usize) -> usize {
        let edge = &self.edges[e];
        if edge.a == v {
            edge.b
        } else {
            edge.a
        }
    }
}

/// The two subcurves cut out at a self-intersection, as arc sets: index 0
/// runs from the first visit to the second in traversal order. For the
/// empty vertex, index 0 is the point and index 1 the whole curve.
pub fn subcurves(d: &CurveDiagram, crossing: Option<CrossingId>) -> Option<[BTreeSet<ArcId>; 2]> {
    let arcs = d.arcs();
    match crossing {
        None => Some([BTreeSet::new(), arcs.iter().copied().collect()]),
        Some(c) => {
            let [v0, v1] = d.visits(c)?;
            let inner: BTreeSet<ArcId> = arcs[v0..v1].iter().copied().collect();
            let outer = arcs.iter().copied().filter(|a| !inner.contains(a)).collect();
            Some([inner, outer])
        }
    }
}

/// Match subcurves of two vertices on the arcs of `stable`; returns whether
/// the sides swap.
fn match_sides(
    from: &[BTreeSet<ArcId>; 2],
    to: &[BTreeSet<ArcId>; 2],
    stable: &BTreeSet<ArcId>,
) -> Result<bool, String> {
    match_sides_via(from, to, stable, |a| a)
}

/// As [`match_sides`], reading each stable arc of `from` through `map`.
fn match_sides_via(
    from: &[BTreeSet<ArcId>; 2],
    to: &[BTreeSet<ArcId>; 2],
    stable: &BTreeSet<ArcId>,
    map: impl Fn(ArcId) -> ArcId,
) -> Result<bool, String> {
    let mut votes = BTreeSet::new();
    for (x, side) in from.iter().enumerate() {
        for &arc in side.intersection(stable) {
            let arc = &map(arc);
            let y = if to[0].contains(arc) { 0 } else if to[1].contains(arc) { 1 } else { continue };
            votes.insert(x != y);
        }
    }
    match votes.len() {
        1 => Ok(*votes.iter().next().unwrap()),
        0 => Err("no shared arc fixes the sides".into()),
        _ => Err("shared arcs fall on both sides".into()),
    }
}

/// Which side of a kink is the monogon: the side made only of `loop_arcs`.
fn kink_side(sides: &[BTreeSet<ArcId>; 2], loop_arcs: &BTreeSet<ArcId>) -> Result<usize, String> {
    let small: Vec<usize> = (0..2)
        .filter(|&x| !sides[x].is_empty() && sides[x].is_subset(loop_arcs))
        .collect();
    match small.as_slice() {
        [x] => Ok(*x),
        _ => Err("cannot tell the kink's loop from the rest of the curve".into()),
    }
}

fn long_arcs(dc: &DoubledCurve) -> BTreeSet<ArcId> {
    let short = dc.cluster_internal_arcs();
    dc.beta.arcs().iter().copied().filter(|a| !short.contains(a)).collect()
}

fn common_arcs(a: &CurveDiagram, b: &CurveDiagram) -> BTreeSet<ArcId> {
    let left: BTreeSet<ArcId> = a.arcs().iter().copied().collect();
    b.arcs().iter().copied().filter(|x| left.contains(x)).collect()
}

/// Arcs whose membership in a continued crossing's subcurves cannot change
/// across the move at gap `j`.
fn stable_across(s: &ElaboratedScript, j: usize) -> BTreeSet<ArcId> {
    let mut stable = common_arcs(&s.levels[j], &s.levels[j + 1]);
    if let ReidemeisterMove::R3 { face, .. } = &s.records[j].mv {
        for a in face {
            stable.remove(a);
        }
    }
    stable
}

/// The bigon pair and its arcs for a horizontal edge at `level`.
fn horizontal_pairs(s: &ElaboratedScript, level: usize) -> Vec<([CrossingId; 2], [ArcId; 2])> {
    let d = &s.levels[level];
    let mut out = Vec::new();
    let mut push = |pair: [CrossingId; 2]| {
        if let Some(arcs) = bigon_arcs(d, pair[0], pair[1]) {
            out.push((pair, arcs));
        }
    };
    if level > 0 {
        if let ReidemeisterMove::R2Plus { new_crossings, .. } = &s.records[level - 1].mv {
            push(*new_crossings);
        }
    }
    if level < s.records.len() {
        if let ReidemeisterMove::R2Minus { crossings } = &s.records[level].mv {
            push(*crossings);
        }
    }
    out
}

fn check_contraction(s: &ElaboratedScript) -> Result<(), HalvingError> {
    if s.script.terminal != Terminal::Point {
        return Err(HalvingError::NotAContraction("terminal must be a point".into()));
    }
    let last = s.levels.last().unwrap();
    if last.crossing_count() != 0 {
        return Err(HalvingError::NotAContraction(format!(
            "last level has {} crossings",
            last.crossing_count()
        )));
    }
    Ok(())
}

/// Build the tracking graph of a contraction script whose initial curve is
/// `dc.beta`.
pub fn build_tracking_graph(
    s: &ElaboratedScript,
    dc: &DoubledCurve,
) -> Result<CrossingTrackGraph, HalvingError> {
    check_contraction(s)?;
    if s.levels[0] != dc.beta {
        return Err(HalvingError::InitialMismatch);
    }
    let mut vertices = Vec::new();
    let mut index = BTreeMap::new();
    for (level, d) in s.levels.iter().enumerate() {
        for crossing in std::iter::once(None).chain(d.crossing_ids().into_iter().map(Some)) {
            let v = TrackVertex { level, crossing };
            index.insert(v, vertices.len());
            vertices.push(v);
        }
    }
    let at = |level: usize, crossing: Option<CrossingId>| index[&TrackVertex { level, crossing }];
    let sides = |level: usize, c: Option<CrossingId>| subcurves(&s.levels[level], c).unwrap();
    let inconsistent = |level: usize| move |detail: String| HalvingError::SideInconsistency { level, detail };
    let mut edges = Vec::new();

    for (j, record) in s.records.iter().enumerate() {
        let stable = stable_across(s, j);
        for (&old, &new) in &record.correspondence {
            let swap = match_sides(&sides(j, Some(old)), &sides(j + 1, Some(new)), &stable)
                .map_err(inconsistent(j))?;
            edges.push(TrackEdge {
                a: at(j, Some(old)),
                b: at(j + 1, Some(new)),
                label: TrackEdgeLabel::Continuation,
                swap,
            });
        }
        match &record.mv {
            ReidemeisterMove::R1Plus { new_crossing, .. } => {
                let created: BTreeSet<ArcId> = record.created_arcs.iter().copied().collect();
                let small = kink_side(&sides(j + 1, Some(*new_crossing)), &created)
                    .map_err(inconsistent(j + 1))?;
                edges.push(TrackEdge {
                    a: at(j, None),
                    b: at(j + 1, Some(*new_crossing)),
                    label: TrackEdgeLabel::R1Link,
                    swap: small != 0,
                });
            }
            ReidemeisterMove::R1Minus { crossing } => {
                let destroyed: BTreeSet<ArcId> = record.destroyed_arcs.iter().copied().collect();
                let small =
                    kink_side(&sides(j, Some(*crossing)), &destroyed).map_err(inconsistent(j))?;
                edges.push(TrackEdge {
                    a: at(j, Some(*crossing)),
                    b: at(j + 1, None),
                    label: TrackEdgeLabel::R1Link,
                    swap: small != 0,
                });
            }
            _ => {}
        }
    }

    for level in 0..s.levels.len() {
        for ([x, y], bigon) in horizontal_pairs(s, level) {
            let mut stable: BTreeSet<ArcId> = s.levels[level].arcs().iter().copied().collect();
            for a in bigon {
                stable.remove(&a);
            }
            let swap = match_sides(&sides(level, Some(x)), &sides(level, Some(y)), &stable)
                .map_err(inconsistent(level))?;
            edges.push(TrackEdge {
                a: at(level, Some(x)),
                b: at(level, Some(y)),
                label: TrackEdgeLabel::R2Horizontal,
                swap,
            });
        }
    }

    let swap_map = dc.half_swap();
    let long_arcs = long_arcs(dc);
    for cl in &dc.clusters {
        for [x, y] in [[cl.crossings[0], cl.crossings[1]], [cl.crossings[2], cl.crossings[3]]] {
            let swap = match_sides_via(&sides(0, Some(x)), &sides(0, Some(y)), &long_arcs, |a| swap_map[&a])
                .map_err(inconsistent(0))?;
            edges.push(TrackEdge {
                a: at(0, Some(x)),
                b: at(0, Some(y)),
                label: TrackEdgeLabel::BetaExtra,
                swap,
            });
        }
    }

    let mut incident = vec![Vec::new(); vertices.len()];
    for (e, edge) in edges.iter().enumerate() {
        incident[edge.a].push(e);
        incident[edge.b].push(e);
    }
    let last = s.levels.len() - 1;
    let start = at(0, Some(dc.base));
    let terminal: BTreeSet<usize> = vertices
        .iter()
        .enumerate()
        .filter(|(i, v)| v.crossing.is_none() || v.level == last || *i == start)
        .map(|(i, _)| i)
        .collect();
    let g = CrossingTrackGraph { vertices, edges, terminal, start, index, incident };
    for (v, vx) in g.vertices.iter().enumerate() {
        if !g.terminal.contains(&v) && g.degree(v) != 2 {
            return Err(HalvingError::DegreeViolation {
                level: vx.level,
                crossing: vx.crossing,
                degree: g.degree(v),
            });
        }
    }
    Ok(g)
}

/// One step of the forced trail: the vertex reached and the edge used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkStep {
    pub vertex: usize,
    pub edge: usize,
}

/// Follow the trail from the base crossing until it first reaches another
/// terminal vertex.
pub fn walk_halving_path(g: &CrossingTrackGraph) -> Result<Vec<WalkStep>, HalvingError> {
    let bound = g.edges.len();
    let mut used = vec![false; g.edges.len()];
    let mut v = g.start;
    let mut out = Vec::new();
    loop {
        if !out.is_empty() && g.terminal.contains(&v) {
            return Ok(out);
        }
        if out.len() >= bound {
            return Err(HalvingError::NonTermination { steps: bound });
        }
        let Some(&e) = g.incident_edges(v).iter().find(|&&e| !used[e]) else {
            return Err(HalvingError::NonTermination { steps: out.len() });
        };
        used[e] = true;
        v = g.other_end(e, v);
        out.push(WalkStep { vertex: v, edge: e });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcurveEntry {
    pub level: usize,
    pub crossing: Option<CrossingId>,
    /// 1 or 2; see [`subcurves`] for the numbering.
    pub side: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalvingOutcome {
    /// The first half was contracted to a point.
    Point,
    /// The first half became the whole curve at this level; the rest of the
    /// contraction finishes the job.
    ResumeAtLevel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcurveSelection {
    pub path: Vec<SubcurveEntry>,
    pub outcome: HalvingOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resume_level: Option<usize>,
}

/// Fold the side bijections along the walk, starting from the side of the
/// base crossing that is the first half of `beta`.
pub fn extract_subcurves(
    s: &ElaboratedScript,
    g: &CrossingTrackGraph,
    path: &[WalkStep],
    dc: &DoubledCurve,
) -> Result<SubcurveSelection, HalvingError> {
    let base_sides = subcurves(&s.levels[0], Some(dc.base)).ok_or(HalvingError::InitialMismatch)?;
    let first = dc.first_half_arcs();
    let mut side = base_sides.iter().position(|x| *x == first).ok_or_else(|| {
        HalvingError::SideInconsistency { level: 0, detail: "first half is not a subcurve of the base".into() }
    })?;
    let entry = |v: usize, side: usize| {
        let vx = g.vertices[v];
        SubcurveEntry { level: vx.level, crossing: vx.crossing, side: side as u8 + 1 }
    };
    let mut out = vec![entry(g.start, side)];
    for step in path {
        if g.edges[step.edge].swap {
            side = 1 - side;
        }
        let next = entry(step.vertex, side);
        check_selection_step(s, dc, out.last().unwrap(), &next)
            .map_err(|detail| HalvingError::SideInconsistency { level: next.level, detail })?;
        out.push(next);
    }
    let last = *out.last().unwrap();
    let (outcome, resume_level) = match (last.crossing, last.side) {
        (None, 1) => (HalvingOutcome::Point, None),
        (None, _) => (HalvingOutcome::ResumeAtLevel, Some(last.level)),
        (Some(_), _) => {
            return Err(HalvingError::SideInconsistency {
                level: last.level,
                detail: "walk ended at a crossing".into(),
            })
        }
    };
    Ok(SubcurveSelection { path: out, outcome, resume_level })
}

fn subcurve(s: &ElaboratedScript, e: &SubcurveEntry) -> Option<BTreeSet<ArcId>> {
    let level = s.levels.get(e.level)?;
    let sides = subcurves(level, e.crossing)?;
    sides.into_iter().nth(e.side.checked_sub(1)? as usize)
}

/// Agreement on `stable` arcs, for the subcurve and for its complement.
fn agree_on(
    d_from: &CurveDiagram,
    from: &BTreeSet<ArcId>,
    d_to: &CurveDiagram,
    to: &BTreeSet<ArcId>,
    stable: &BTreeSet<ArcId>,
) -> bool {
    let restrict = |d: &CurveDiagram, x: &BTreeSet<ArcId>| -> (BTreeSet<ArcId>, BTreeSet<ArcId>) {
        d.arcs()
            .iter()
            .filter(|a| stable.contains(a))
            .partition(|a| x.contains(a))
    };
    let (a_in, a_out) = restrict(d_from, from);
    let (b_in, b_out) = restrict(d_to, to);
    a_in == b_in && a_out == b_out && !(a_in.is_empty() && a_out.is_empty())
}

/// Re-derive from the level diagrams that two consecutive subcurves differ
/// by a local move.
pub fn check_selection_step(
    s: &ElaboratedScript,
    dc: &DoubledCurve,
    e: &SubcurveEntry,
    f: &SubcurveEntry,
) -> Result<(), String> {
    let (Some(from), Some(to)) = (subcurve(s, e), subcurve(s, f)) else {
        return Err("entry names no subcurve".into());
    };
    let (de, df) = (&s.levels[e.level], &s.levels[f.level]);
    match (e.crossing, f.crossing) {
        (Some(x), Some(y)) if e.level == f.level => {
            if e.level == 0 {
                let swap = dc.half_swap();
                let paired = dc.clusters.iter().any(|cl| {
                    let c = cl.crossings;
                    [[c[0], c[1]], [c[1], c[0]], [c[2], c[3]], [c[3], c[2]]].contains(&[x, y])
                });
                if paired {
                    let long = long_arcs(dc);
                    let image: BTreeSet<ArcId> = from.intersection(&long).map(|a| swap[a]).collect();
                    let rest: BTreeSet<ArcId> = long.difference(&from).map(|a| swap[a]).collect();
                    return if image.is_subset(&to) && rest.is_disjoint(&to) {
                        Ok(())
                    } else {
                        Err("cluster swap does not carry the subcurve".into())
                    };
                }
            }
            for (pair, bigon) in horizontal_pairs(s, e.level) {
                if pair == [x, y] || pair == [y, x] {
                    let mut stable: BTreeSet<ArcId> = de.arcs().iter().copied().collect();
                    for a in bigon {
                        stable.remove(&a);
                    }
                    return if agree_on(de, &from, df, &to, &stable) {
                        Ok(())
                    } else {
                        Err("subcurves differ away from the bigon".into())
                    };
                }
            }
            Err("same-level step between unrelated crossings".into())
        }
        (Some(x), Some(y)) if f.level == e.level + 1 || e.level == f.level + 1 => {
            let j = e.level.min(f.level);
            let (old, new) = if f.level > e.level { (x, y) } else { (y, x) };
            if s.records[j].correspondence.get(&old) != Some(&new) {
                return Err("crossings do not continue into each other".into());
            }
            if agree_on(de, &from, df, &to, &stable_across(s, j)) {
                Ok(())
            } else {
                Err("subcurve changes away from the move".into())
            }
        }
        (Some(c), None) | (None, Some(c)) if e.level.abs_diff(f.level) == 1 => {
            let j = e.level.min(f.level);
            let (kink_entry, empty_entry, kink_level, loop_arcs) = match &s.records[j].mv {
                ReidemeisterMove::R1Plus { new_crossing, .. } if *new_crossing == c => {
                    let (k, p) = if e.crossing.is_some() { (e, f) } else { (f, e) };
                    (k, p, j + 1, &s.records[j].created_arcs)
                }
                ReidemeisterMove::R1Minus { crossing } if *crossing == c => {
                    let (k, p) = if e.crossing.is_some() { (e, f) } else { (f, e) };
                    (k, p, j, &s.records[j].destroyed_arcs)
                }
                _ => return Err("no kink move joins these entries".into()),
            };
            if kink_entry.level != kink_level {
                return Err("kink is on the wrong level".into());
            }
            let loop_arcs: BTreeSet<ArcId> = loop_arcs.iter().copied().collect();
            let sides = subcurves(&s.levels[kink_level], Some(c)).unwrap();
            let small = kink_side(&sides, &loop_arcs)?;
            let kink_is_small = kink_entry.side as usize - 1 == small;
            let empty_is_point = empty_entry.side == 1;
            if kink_is_small == empty_is_point {
                Ok(())
            } else {
                Err("kink loop must shrink to the point".into())
            }
        }
        _ => Err("entries are not adjacent in the tracking graph".into()),
    }
}

/// Every check on a selection, from the script alone.
pub fn verify_selection(
    s: &ElaboratedScript,
    dc: &DoubledCurve,
    sel: &SubcurveSelection,
) -> Vec<String> {
    let mut out = Vec::new();
    let Some(first) = sel.path.first() else {
        return vec!["empty selection".into()];
    };
    if first.level != 0 || first.crossing != Some(dc.base) || subcurve(s, first) != Some(dc.first_half_arcs()) {
        out.push("selection does not start at the first half of beta".into());
    }
    for (i, w) in sel.path.windows(2).enumerate() {
        if let Err(detail) = check_selection_step(s, dc, &w[0], &w[1]) {
            out.push(format!("step {i}: {detail}"));
        }
    }
    let last = sel.path.last().unwrap();
    let expected = match (last.crossing, last.side) {
        (None, 1) => Some((HalvingOutcome::Point, None)),
        (None, 2) => Some((HalvingOutcome::ResumeAtLevel, Some(last.level))),
        _ => None,
    };
    if expected != Some((sel.outcome, sel.resume_level)) {
        out.push("outcome does not match the last entry".into());
    }
    out
}

/// The whole halving pipeline on an elaborated contraction of `dc.beta`.
pub fn halve(s: &ElaboratedScript, dc: &DoubledCurve) -> Result<SubcurveSelection, HalvingError> {
    let g = build_tracking_graph(s, dc)?;
    let path = walk_halving_path(&g)?;
    extract_subcurves(s, &g, &path, dc)
}
