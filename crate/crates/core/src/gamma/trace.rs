//! Path search through the resolution graph and independent trace checking.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::diagram::{ArcId, CrossingId};
use crate::moves::{ElaboratedScript, ReidemeisterMove};
use crate::smoothing::{
    check_image_equivalence, component_count, smooth, Resolution, ResolvedCurve, Sign, SmoothOutcome,
};

use super::{classify_bigon, local_r3_matchings, BigonClass, EdgeLabel, GammaError, ResolutionGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "+")]
    Same,
    #[serde(rename = "-")]
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub level_from: usize,
    pub level_to: usize,
    pub edge: EdgeLabel,
    /// +1 forward in time, -1 backward, 0 for a same-level step.
    pub direction: i8,
    pub resolution_from: Resolution,
    pub resolution_to: Resolution,
}

/// A walk through the resolution graph from the simple initial curve to the
/// last level, plus how the final resolved curve is oriented against the
/// traversal of the last diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotopyTrace {
    pub steps: Vec<TraceStep>,
    pub final_orientation: Orientation,
}

impl IsotopyTrace {
    /// Visited vertices as (level, resolution), starting at level 0.
    pub fn vertices(&self) -> Vec<(usize, Resolution)> {
        let mut out = vec![(0, Resolution::empty())];
        for s in &self.steps {
            out.push((s.level_to, s.resolution_to.clone()));
        }
        out
    }

    pub fn count(&self, label: EdgeLabel) -> usize {
        self.steps.iter().filter(|s| s.edge == label).count()
    }
}

/// Breadth-first search from the empty level-0 resolution to the first
/// level-`n` vertex reached, neighbours taken in canonical key order.
pub fn find_isotopy_path(s: &ElaboratedScript, g: &ResolutionGraph) -> Result<IsotopyTrace, GammaError> {
    let initial = s.levels[0].crossing_count();
    if initial != 0 {
        return Err(GammaError::NonSimpleInitial(initial));
    }
    let start = g.start().ok_or(GammaError::NoPathFound)?;
    let last = g.level_count - 1;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.vertices.len()];
    let mut seen = vec![false; g.vertices.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut goal = None;
    while let Some(v) = queue.pop_front() {
        if g.vertices[v].level == last {
            goal = Some(v);
            break;
        }
        for &e in g.incident_edges(v) {
            let w = g.other_end(e, v);
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    let goal = goal.ok_or(GammaError::NoPathFound)?;
    let mut chain = vec![];
    let mut v = goal;
    while let Some((u, e)) = parent[v] {
        chain.push((u, v, e));
        v = u;
    }
    chain.reverse();
    let steps: Vec<TraceStep> = chain
        .into_iter()
        .map(|(u, v, e)| {
            let (a, b) = (&g.vertices[u], &g.vertices[v]);
            TraceStep {
                level_from: a.level,
                level_to: b.level,
                edge: g.edges[e].label,
                direction: (b.level as i64 - a.level as i64) as i8,
                resolution_from: a.resolution.clone(),
                resolution_to: b.resolution.clone(),
            }
        })
        .collect();
    let final_orientation = match trace_orientation(s, &steps) {
        Ok(o) => o,
        Err(_) => return Err(GammaError::NoPathFound),
    };
    Ok(IsotopyTrace { steps, final_orientation })
}

fn resolved(s: &ElaboratedScript, level: usize, r: &Resolution) -> Option<ResolvedCurve> {
    match smooth(&s.levels[level], r) {
        SmoothOutcome::Connected(c) => Some(c),
        SmoothOutcome::Components(_) => None,
    }
}

/// Arcs whose traversal direction must carry across a step unchanged.
fn stable_arcs(s: &ElaboratedScript, step: &TraceStep) -> BTreeSet<ArcId> {
    let a: BTreeSet<ArcId> = s.levels[step.level_from].arcs().iter().copied().collect();
    let b: BTreeSet<ArcId> = s.levels[step.level_to].arcs().iter().copied().collect();
    let mut common: BTreeSet<ArcId> = a.intersection(&b).copied().collect();
    let gap = step.level_from.min(step.level_to);
    if step.direction == 0 {
        // a same-level flip may reverse the two bigon arcs
        for pair in trapped_pairs(s, step.level_from) {
            if let Some(arcs) = crate::moves::bigon_arcs(&s.levels[step.level_from], pair[0], pair[1]) {
                for arc in arcs {
                    common.remove(&arc);
                }
            }
        }
    } else if let ReidemeisterMove::R3 { face, .. } = &s.records[gap].mv {
        for arc in face {
            common.remove(arc);
        }
    }
    common
}

/// Bigon pairs created just before or destroyed just after `level`.
fn trapped_pairs(s: &ElaboratedScript, level: usize) -> Vec<[CrossingId; 2]> {
    let mut out = Vec::new();
    if level > 0 {
        if let ReidemeisterMove::R2Plus { new_crossings, .. } = &s.records[level - 1].mv {
            out.push(*new_crossings);
        }
    }
    if level < s.records.len() {
        if let ReidemeisterMove::R2Minus { crossings } = &s.records[level].mv {
            out.push(*crossings);
        }
    }
    out
}

/// Whether the step flips the orientation of the tracked curve, judged on
/// the arcs both resolved curves share; `Err` if those arcs disagree.
fn step_flip(s: &ElaboratedScript, step: &TraceStep) -> Result<bool, String> {
    let from = resolved(s, step.level_from, &step.resolution_from).ok_or("source not connected")?;
    let to = resolved(s, step.level_to, &step.resolution_to).ok_or("target not connected")?;
    let mut flips = BTreeSet::new();
    for arc in stable_arcs(s, step) {
        if let (Some(f), Some(g)) = (from.reversed_flag(arc), to.reversed_flag(arc)) {
            flips.insert(f != g);
        }
    }
    match flips.len() {
        0 => Ok(false),
        1 => Ok(*flips.iter().next().unwrap()),
        _ => Err("shared arcs disagree on orientation".into()),
    }
}

fn trace_orientation(s: &ElaboratedScript, steps: &[TraceStep]) -> Result<Orientation, String> {
    let mut reversed = false;
    for step in steps {
        reversed ^= step_flip(s, step)?;
    }
    Ok(if reversed { Orientation::Reversed } else { Orientation::Same })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum TraceViolation {
    BadStart,
    Disconnected { index: usize },
    IllegalStep { index: usize, detail: String },
    NotAdmissible { index: usize },
    ImageMismatch { index: usize },
    NotFinal,
    NotUniqueFinal,
    OrientationMismatch { claimed: Orientation, recomputed: Option<Orientation> },
}

fn without(r: &Resolution, crossings: &[CrossingId]) -> Resolution {
    let mut r = r.clone();
    for c in crossings {
        r.remove(*c);
    }
    r
}

/// Check one step against the move at its level gap, from scratch.
fn check_step(s: &ElaboratedScript, step: &TraceStep) -> Result<(), String> {
    if step.direction == 0 {
        if step.edge != EdgeLabel::M2b || step.level_from != step.level_to {
            return Err("only M2b steps stay on one level".into());
        }
        let level = step.level_from;
        let (a, b) = (&step.resolution_from, &step.resolution_to);
        if a.crossings() != b.crossings() {
            return Err("M2b endpoints resolve different crossings".into());
        }
        let changed: Vec<CrossingId> =
            a.iter().filter(|(c, sign)| b.get(*c) != Some(*sign)).map(|(c, _)| c).collect();
        let d = &s.levels[level];
        for pair in trapped_pairs(s, level) {
            let mut want = pair.to_vec();
            want.sort();
            if changed == want {
                let class = classify_bigon(d, pair[0], pair[1], a).map_err(|e| e.to_string())?;
                return if class == BigonClass::Trapped {
                    Ok(())
                } else {
                    Err(format!("bigon {pair:?} is {class:?}, not trapped"))
                };
            }
        }
        return Err("M2b must flip both signs of a bigon created or destroyed next to this level".into());
    }
    if step.level_from.abs_diff(step.level_to) != 1
        || step.direction != (step.level_to as i64 - step.level_from as i64) as i8
    {
        return Err("vertical step must join adjacent levels with matching direction".into());
    }
    let (j, lo, hi) = if step.direction > 0 {
        (step.level_from, &step.resolution_from, &step.resolution_to)
    } else {
        (step.level_to, &step.resolution_to, &step.resolution_from)
    };
    let (lower, upper) = (&s.levels[j], &s.levels[j + 1]);
    match (&s.records[j].mv, step.edge) {
        (ReidemeisterMove::R1Plus { new_crossing, .. }, EdgeLabel::M1Plus) => {
            match hi.get(*new_crossing) {
                Some(sign) if &without(hi, &[*new_crossing]) == lo => {
                    if component_count(upper, &lo.with(*new_crossing, sign)) == 1 {
                        Ok(())
                    } else {
                        Err("kink smoothed with the detaching sign".into())
                    }
                }
                _ => Err("upper resolution is not the lower one plus the kink".into()),
            }
        }
        (ReidemeisterMove::R1Minus { crossing }, EdgeLabel::M1Minus) => match lo.get(*crossing) {
            Some(_) if &without(lo, &[*crossing]) == hi => Ok(()),
            _ => Err("lower resolution is not the upper one plus the kink".into()),
        },
        (ReidemeisterMove::R2Plus { new_crossings, .. }, EdgeLabel::M2aPlus) => {
            if &without(hi, new_crossings) != lo {
                return Err("resolutions differ away from the new bigon".into());
            }
            match classify_bigon(upper, new_crossings[0], new_crossings[1], hi) {
                Ok(BigonClass::Separable) => Ok(()),
                other => Err(format!("bigon classified {other:?}")),
            }
        }
        (ReidemeisterMove::R2Minus { crossings }, EdgeLabel::M2aMinus) => {
            if &without(lo, crossings) != hi {
                return Err("resolutions differ away from the removed bigon".into());
            }
            match classify_bigon(lower, crossings[0], crossings[1], lo) {
                Ok(BigonClass::Separable) => Ok(()),
                other => Err(format!("bigon classified {other:?}")),
            }
        }
        (ReidemeisterMove::R3 { crossings, face }, label @ (EdgeLabel::M3a | EdgeLabel::M3bPlus | EdgeLabel::M3bMinus)) => {
            if without(lo, crossings) != without(hi, crossings) {
                return Err("resolutions differ outside the triangle".into());
            }
            let m = local_r3_matchings(lower, upper, *crossings, *face).map_err(|e| e.to_string())?;
            let local = |r: &Resolution| -> [Sign; 3] {
                std::array::from_fn(|i| r.get(crossings[i]).unwrap_or(Sign::Positive))
            };
            let (a, b) = (local(lo), local(hi));
            let ok = match label {
                EdgeLabel::M3a => m.one_to_one.contains(&(a, b)),
                EdgeLabel::M3bPlus => m.fan_forward.as_ref().is_some_and(|(x, ys)| *x == a && ys.contains(&b)),
                _ => m.fan_backward.as_ref().is_some_and(|(xs, y)| xs.contains(&a) && *y == b),
            };
            if ok {
                Ok(())
            } else {
                Err(format!("local signs {a:?} -> {b:?} are not a {label:?} pair"))
            }
        }
        (mv, label) => Err(format!("{label:?} does not match move {}", mv.type_name())),
    }
}

/// Re-derive every claim of a trace from the script alone.
pub fn verify_trace(s: &ElaboratedScript, trace: &IsotopyTrace) -> Vec<TraceViolation> {
    let mut out = Vec::new();
    let last = s.levels.len() - 1;
    let mut current = (0usize, Resolution::empty());
    if s.levels[0].crossing_count() != 0 {
        out.push(TraceViolation::BadStart);
    }
    let visit = |index: usize, level: usize, r: &Resolution, out: &mut Vec<TraceViolation>| {
        let d = &s.levels[level];
        if !r.is_total_on(d) || component_count(d, r) != 1 {
            out.push(TraceViolation::NotAdmissible { index });
            return;
        }
        let identity = ResolvedCurve { arcs: d.arcs().iter().map(|a| (*a, false)).collect() };
        let curve = resolved(s, level, r).unwrap();
        if check_image_equivalence(&curve, &identity) != Ok(true) {
            out.push(TraceViolation::ImageMismatch { index });
        }
    };
    visit(0, 0, &current.1, &mut out);
    for (i, step) in trace.steps.iter().enumerate() {
        if step.level_from > last || step.level_to > last {
            out.push(TraceViolation::IllegalStep { index: i, detail: "level out of range".into() });
            return out;
        }
        if (step.level_from, &step.resolution_from) != (current.0, &current.1) {
            out.push(TraceViolation::Disconnected { index: i });
        }
        if let Err(detail) = check_step(s, step) {
            out.push(TraceViolation::IllegalStep { index: i, detail });
        }
        visit(i + 1, step.level_to, &step.resolution_to, &mut out);
        current = (step.level_to, step.resolution_to.clone());
    }
    if current.0 != last {
        out.push(TraceViolation::NotFinal);
    } else if s.levels[last].crossing_count() == 0 && !current.1.is_empty() {
        out.push(TraceViolation::NotUniqueFinal);
    }
    if out.is_empty() {
        let recomputed = trace_orientation(s, &trace.steps).ok();
        if recomputed != Some(trace.final_orientation) {
            out.push(TraceViolation::OrientationMismatch { claimed: trace.final_orientation, recomputed });
        }
    }
    out
}
