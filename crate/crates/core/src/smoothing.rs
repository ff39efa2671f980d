//! Crossing smoothings and admissible resolutions.
//!
//! At a crossing whose first passage enters through slot `e1` and second
//! through `e2`, a positive smoothing joins `e1` with `e2 + 2` and `e1 + 2`
//! with `e2` (the orientation-respecting reconnection); a negative smoothing
//! joins `e1` with `e2` and `e1 + 2` with `e2 + 2`. Which reconnection is which
//! does not depend on the direction the curve is traversed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{ArcEnd, ArcId, CrossingId, CurveDiagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

/// Sign assignment keyed by crossing id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Resolution {
    signs: BTreeMap<CrossingId, Sign>,
}

impl Resolution {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_signs(signs: impl IntoIterator<Item = (CrossingId, Sign)>) -> Self {
        Resolution { signs: signs.into_iter().collect() }
    }

    pub fn get(&self, c: CrossingId) -> Option<Sign> {
        self.signs.get(&c).copied()
    }

    pub fn set(&mut self, c: CrossingId, s: Sign) {
        self.signs.insert(c, s);
    }

    pub fn remove(&mut self, c: CrossingId) -> Option<Sign> {
        self.signs.remove(&c)
    }

    pub fn with(&self, c: CrossingId, s: Sign) -> Self {
        let mut r = self.clone();
        r.set(c, s);
        r
    }

    pub fn without(&self, c: CrossingId) -> Self {
        let mut r = self.clone();
        r.remove(c);
        r
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CrossingId, Sign)> + '_ {
        self.signs.iter().map(|(c, s)| (*c, *s))
    }

    pub fn crossings(&self) -> BTreeSet<CrossingId> {
        self.signs.keys().copied().collect()
    }

    /// Signs in increasing crossing-id order.
    pub fn sign_vector(&self) -> Vec<Sign> {
        self.signs.values().copied().collect()
    }

    pub fn is_total_on(&self, d: &CurveDiagram) -> bool {
        self.signs.len() == d.crossing_count() && self.signs.keys().all(|c| d.has_crossing(*c))
    }
}

#[derive(Serialize, Deserialize)]
struct SignEntry {
    crossing: CrossingId,
    sign: Sign,
}

impl Serialize for Resolution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<SignEntry> =
            self.iter().map(|(crossing, sign)| SignEntry { crossing, sign }).collect();
        entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Resolution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<SignEntry>::deserialize(deserializer)?;
        Ok(Resolution::from_signs(entries.into_iter().map(|e| (e.crossing, e.sign))))
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (c, s)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}{}", s.symbol())?;
        }
        write!(f, "}}")
    }
}

/// The single smoothed curve as a cycle of arcs; `true` marks an arc
/// traversed against its diagram orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedCurve {
    pub arcs: Vec<(ArcId, bool)>,
}

impl ResolvedCurve {
    pub fn reversed_flag(&self, arc: ArcId) -> Option<bool> {
        self.arcs.iter().find(|(a, _)| *a == arc).map(|(_, f)| *f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmoothOutcome {
    Connected(ResolvedCurve),
    Components(usize),
}

impl SmoothOutcome {
    pub fn component_count(&self) -> usize {
        match self {
            SmoothOutcome::Connected(_) => 1,
            SmoothOutcome::Components(n) => *n,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmoothingError {
    #[error("{crossings} crossings exceed the enumeration cap of {cap}")]
    CapExceeded { crossings: usize, cap: usize },
    #[error("resolved curves are built over different arc sets")]
    ArcUniverseMismatch,
}

pub const DEFAULT_CAP: usize = 20;

/// The two slot pairs joined at crossing `c` under `sign`.
pub fn slot_pairs(d: &CurveDiagram, c: CrossingId, sign: Sign) -> [[u8; 2]; 2] {
    let [p, q] = d.visits(c).expect("crossing of the diagram");
    let e1 = d.passages()[p].entry;
    let e2 = d.passages()[q].entry;
    match sign {
        Sign::Positive => [[e1, (e2 + 2) % 4], [(e1 + 2) % 4, e2]],
        Sign::Negative => [[e1, e2], [(e1 + 2) % 4, (e2 + 2) % 4]],
    }
}

pub(crate) fn partner_slot(d: &CurveDiagram, c: CrossingId, slot: u8, sign: Option<Sign>) -> u8 {
    match sign {
        None => (slot + 2) % 4,
        Some(s) => {
            let pairs = slot_pairs(d, c, s);
            for [a, b] in pairs {
                if a == slot {
                    return b;
                }
                if b == slot {
                    return a;
                }
            }
            unreachable!("slot pairs cover all four slots")
        }
    }
}

/// Walk the curve obtained by smoothing the crossings `r` assigns; crossings
/// missing from `r` are passed straight through.
pub fn smooth(d: &CurveDiagram, r: &Resolution) -> SmoothOutcome {
    let n = d.arcs().len();
    if d.is_free_loop() {
        return SmoothOutcome::Connected(ResolvedCurve { arcs: vec![(d.arcs()[0], false)] });
    }
    let mut used = vec![false; n];
    let mut components = 0;
    let mut first_cycle = Vec::new();
    for start in 0..n {
        if used[start] {
            continue;
        }
        components += 1;
        let mut k = start;
        let mut forward = true;
        loop {
            used[k] = true;
            if components == 1 {
                first_cycle.push((d.arcs()[k], !forward));
            }
            let arrive_end = if forward { ArcEnd::End } else { ArcEnd::Start };
            let dart = d.arc_end_slot(k, arrive_end).unwrap();
            let next_slot = partner_slot(d, dart.crossing, dart.slot, r.get(dart.crossing));
            let (k2, end2) = d.slot_arc(dart.crossing, next_slot).unwrap();
            let fwd2 = end2 == ArcEnd::Start;
            if k2 == start && fwd2 {
                break;
            }
            if used[k2] {
                // only reachable for the reverse start direction, which cannot
                // happen on a consistent walk
                break;
            }
            k = k2;
            forward = fwd2;
        }
    }
    if components == 1 {
        SmoothOutcome::Connected(ResolvedCurve { arcs: first_cycle })
    } else {
        SmoothOutcome::Components(components)
    }
}

pub fn component_count(d: &CurveDiagram, r: &Resolution) -> usize {
    smooth(d, r).component_count()
}

pub fn is_admissible(d: &CurveDiagram, r: &Resolution) -> bool {
    r.is_total_on(d) && component_count(d, r) == 1
}

/// All total sign assignments with one smoothed component, ordered by sign
/// vector over sorted crossing ids (positive before negative).
pub fn enumerate_admissible(d: &CurveDiagram, cap: usize) -> Result<Vec<Resolution>, SmoothingError> {
    let ids = d.crossing_ids();
    let k = ids.len();
    if k > cap {
        return Err(SmoothingError::CapExceeded { crossings: k, cap });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << k) {
        // most significant bit belongs to the smallest id
        let r = Resolution::from_signs(ids.iter().enumerate().map(|(i, c)| {
            let bit = (mask >> (k - 1 - i)) & 1;
            (*c, if bit == 0 { Sign::Positive } else { Sign::Negative })
        }));
        if component_count(d, &r) == 1 {
            out.push(r);
        }
    }
    Ok(out)
}

/// Whether two resolved curves use the same arcs, each exactly once.
pub fn check_image_equivalence(a: &ResolvedCurve, b: &ResolvedCurve) -> Result<bool, SmoothingError> {
    let set_a: BTreeSet<ArcId> = a.arcs.iter().map(|x| x.0).collect();
    let set_b: BTreeSet<ArcId> = b.arcs.iter().map(|x| x.0).collect();
    if set_a != set_b {
        return Err(SmoothingError::ArcUniverseMismatch);
    }
    Ok(set_a.len() == a.arcs.len() && set_b.len() == b.arcs.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::fixtures::{circle, kink};

    #[test]
    fn circle_empty_resolution_is_single_arc() {
        let d = CurveDiagram::from_json(&circle()).unwrap();
        match smooth(&d, &Resolution::empty()) {
            SmoothOutcome::Connected(c) => assert_eq!(c.arcs, vec![(ArcId(0), false)]),
            other => panic!("{other:?}"),
        }
        assert_eq!(enumerate_admissible(&d, DEFAULT_CAP).unwrap(), vec![Resolution::empty()]);
    }

    #[test]
    fn kink_has_one_connecting_sign() {
        let d = CurveDiagram::from_json(&kink()).unwrap();
        let c = CrossingId(1);
        let pos = component_count(&d, &Resolution::from_signs([(c, Sign::Positive)]));
        let neg = component_count(&d, &Resolution::from_signs([(c, Sign::Negative)]));
        let mut counts = [pos, neg];
        counts.sort();
        assert_eq!(counts, [1, 2]);
        assert_eq!(enumerate_admissible(&d, DEFAULT_CAP).unwrap().len(), 1);
    }

    #[test]
    fn unresolved_crossings_pass_straight() {
        let d = CurveDiagram::from_json(&kink()).unwrap();
        assert_eq!(component_count(&d, &Resolution::empty()), 1);
    }

    #[test]
    fn connected_smoothing_uses_every_arc_once() {
        let d = CurveDiagram::from_json(&kink()).unwrap();
        let r = enumerate_admissible(&d, DEFAULT_CAP).unwrap().remove(0);
        let SmoothOutcome::Connected(curve) = smooth(&d, &r) else { panic!() };
        let ids: BTreeSet<_> = curve.arcs.iter().map(|a| a.0).collect();
        assert_eq!(ids.len(), d.arcs().len());
        assert!(check_image_equivalence(&curve, &curve).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let d = CurveDiagram::from_json(&kink()).unwrap();
        assert_eq!(
            enumerate_admissible(&d, 0),
            Err(SmoothingError::CapExceeded { crossings: 1, cap: 0 })
        );
    }

    #[test]
    fn different_arc_sets_are_a_mismatch() {
        let a = ResolvedCurve { arcs: vec![(ArcId(0), false)] };
        let b = ResolvedCurve { arcs: vec![(ArcId(1), false)] };
        assert_eq!(check_image_equivalence(&a, &b), Err(SmoothingError::ArcUniverseMismatch));
    }
}
