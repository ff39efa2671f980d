//! Local smoothing analysis inside a bigon or a triangle.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagram::{ArcEnd, ArcId, CrossingId, CurveDiagram, Dart};
use crate::moves::bigon_arcs;
use crate::smoothing::{partner_slot, Resolution, Sign};

use super::GammaError;

/// How a smoothed bigon sits relative to the two strands that bound it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BigonClass {
    /// Each strand is reconnected to itself; the picture matches the strands
    /// pulled apart.
    Separable,
    /// The strands turn back at both ends, so one local arc runs through the
    /// whole bigon.
    Trapped,
    /// The two bigon arcs close up into a separate circle.
    Mixed,
}

fn arc_key(d: &CurveDiagram, dart: Dart) -> (ArcId, u8) {
    let (k, end) = d.slot_arc(dart.crossing, dart.slot).expect("slot of the diagram");
    (d.arcs()[k], if end == ArcEnd::Start { 0 } else { 1 })
}

/// Follow a local strand from an outside slot through the smoothed region
/// until it leaves again; `inner` holds the arc ids inside the region.
fn follow(
    d: &CurveDiagram,
    signs: &BTreeMap<CrossingId, Sign>,
    inner: &BTreeSet<ArcId>,
    start: Dart,
    used: &mut BTreeSet<ArcId>,
) -> Dart {
    let mut dart = start;
    loop {
        let slot = partner_slot(d, dart.crossing, dart.slot, signs.get(&dart.crossing).copied());
        let here = Dart { crossing: dart.crossing, slot };
        let (arc, _) = arc_key(d, here);
        if !inner.contains(&arc) {
            return here;
        }
        used.insert(arc);
        dart = d.across(here);
    }
}

/// Count local circles formed only by `inner` arcs not yet `used`.
fn count_circles(
    d: &CurveDiagram,
    signs: &BTreeMap<CrossingId, Sign>,
    inner: &BTreeSet<ArcId>,
    used: &mut BTreeSet<ArcId>,
) -> usize {
    let mut circles = 0;
    for &arc in inner {
        if used.contains(&arc) {
            continue;
        }
        circles += 1;
        let k = d.arc_position(arc).unwrap();
        let mut dart = d.arc_end_slot(k, ArcEnd::End).unwrap();
        loop {
            let (a, _) = arc_key(d, dart);
            if !used.insert(a) {
                break;
            }
            let slot = partner_slot(d, dart.crossing, dart.slot, signs.get(&dart.crossing).copied());
            dart = d.across(Dart { crossing: dart.crossing, slot });
        }
    }
    circles
}

fn outside_slots(d: &CurveDiagram, crossings: &[CrossingId], inner: &BTreeSet<ArcId>) -> Vec<Dart> {
    let mut out = Vec::new();
    for &c in crossings {
        for slot in 0..4 {
            let dart = Dart { crossing: c, slot };
            if !inner.contains(&arc_key(d, dart).0) {
                out.push(dart);
            }
        }
    }
    out
}

/// Classify the smoothing of the bigon between `c1` and `c2` under `r`.
pub fn classify_bigon(
    d: &CurveDiagram,
    c1: CrossingId,
    c2: CrossingId,
    r: &Resolution,
) -> Result<BigonClass, GammaError> {
    let arcs = bigon_arcs(d, c1, c2).ok_or(GammaError::NotABigon(c1, c2))?;
    let (Some(s1), Some(s2)) = (r.get(c1), r.get(c2)) else {
        return Err(GammaError::UnassignedCrossing);
    };
    let signs: BTreeMap<CrossingId, Sign> = [(c1, s1), (c2, s2)].into_iter().collect();
    let inner: BTreeSet<ArcId> = arcs.into_iter().collect();
    let mut used = BTreeSet::new();
    let mut c1_ends = Vec::new();
    for start in outside_slots(d, &[c1, c2], &inner) {
        let end = follow(d, &signs, &inner, start, &mut used);
        if start.crossing == c1 {
            c1_ends.push(end);
        }
    }
    if used.len() < inner.len() {
        return Ok(BigonClass::Mixed);
    }
    if c1_ends.iter().all(|e| e.crossing == c1) {
        Ok(BigonClass::Trapped)
    } else {
        Ok(BigonClass::Separable)
    }
}

/// Pairing of a smoothed triangle's six outside points plus inner circles.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LocalMatching {
    pub pairs: Vec<((ArcId, u8), (ArcId, u8))>,
    pub circles: usize,
}

pub fn local_matching(
    d: &CurveDiagram,
    triple: [CrossingId; 3],
    triangle: [ArcId; 3],
    signs: [Sign; 3],
) -> LocalMatching {
    let map: BTreeMap<CrossingId, Sign> = triple.iter().copied().zip(signs).collect();
    let inner: BTreeSet<ArcId> = triangle.into_iter().collect();
    let mut used = BTreeSet::new();
    let mut pairs = Vec::new();
    let mut done = BTreeSet::new();
    for start in outside_slots(d, &triple, &inner) {
        if done.contains(&start) {
            continue;
        }
        let end = follow(d, &map, &inner, start, &mut used);
        done.insert(start);
        done.insert(end);
        let (a, b) = (arc_key(d, start), arc_key(d, end));
        pairs.push(if a <= b { (a, b) } else { (b, a) });
    }
    pairs.sort();
    let circles = count_circles(d, &map, &inner, &mut used);
    LocalMatching { pairs, circles }
}

pub const ALL_TRIPLES: [[Sign; 3]; 8] = {
    use Sign::{Negative as N, Positive as P};
    [[P, P, P], [P, P, N], [P, N, P], [P, N, N], [N, P, P], [N, P, N], [N, N, P], [N, N, N]]
};

/// Local correspondences across one R3 move, keyed by the signs of the
/// triple (in the order given).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct R3Matchings {
    pub before: BTreeMap<LocalMatching, Vec<[Sign; 3]>>,
    pub after: BTreeMap<LocalMatching, Vec<[Sign; 3]>>,
    /// Same local picture on both sides, realized once on each.
    pub one_to_one: Vec<([Sign; 3], [Sign; 3])>,
    /// One assignment before, three after, all with the same picture.
    pub fan_forward: Option<([Sign; 3], Vec<[Sign; 3]>)>,
    /// Three assignments before, one after.
    pub fan_backward: Option<(Vec<[Sign; 3]>, [Sign; 3])>,
}

pub fn local_r3_matchings(
    before: &CurveDiagram,
    after: &CurveDiagram,
    triple: [CrossingId; 3],
    triangle: [ArcId; 3],
) -> Result<R3Matchings, GammaError> {
    let is_triangle = |d: &CurveDiagram| {
        let want: BTreeSet<CrossingId> = triple.into_iter().collect();
        let arcs: BTreeSet<ArcId> = triangle.into_iter().collect();
        d.faces().faces.iter().any(|f| {
            f.len() == 3
                && f.crossings() == want
                && f.sides.iter().map(|s| s.0).collect::<BTreeSet<_>>() == arcs
        })
    };
    if !is_triangle(before) || !is_triangle(after) {
        return Err(GammaError::NotATriangle);
    }
    let table = |d: &CurveDiagram| {
        let mut t: BTreeMap<LocalMatching, Vec<[Sign; 3]>> = BTreeMap::new();
        for signs in ALL_TRIPLES {
            t.entry(local_matching(d, triple, triangle, signs)).or_default().push(signs);
        }
        t
    };
    let mut m = R3Matchings { before: table(before), after: table(after), ..Default::default() };
    let mut only_before = 0;
    for (class, b) in &m.before {
        match (b.len(), m.after.get(class).map(|a| a.as_slice())) {
            (_, None) => {
                if class.circles == 0 {
                    return Err(GammaError::FanCountViolation(
                        "a circle-free local picture exists on one side only".into(),
                    ));
                }
                only_before += 1;
            }
            (1, Some([a])) => m.one_to_one.push((b[0], *a)),
            (1, Some(a)) if a.len() == 3 && m.fan_forward.is_none() => {
                m.fan_forward = Some((b[0], a.to_vec()))
            }
            (3, Some([a])) if m.fan_backward.is_none() => m.fan_backward = Some((b.clone(), *a)),
            (nb, Some(a)) => {
                return Err(GammaError::FanCountViolation(format!(
                    "local picture realized {nb} times before and {} times after",
                    a.len()
                )))
            }
        }
    }
    let only_after = m.after.keys().filter(|k| !m.before.contains_key(*k)).count();
    if only_before != 1 || only_after != 1 || m.fan_forward.is_none() || m.fan_backward.is_none() {
        return Err(GammaError::FanCountViolation(format!(
            "{only_before} before-only and {only_after} after-only pictures"
        )));
    }
    Ok(m)
}
