//! Combinatorial immersed closed curves.
//!
//! A [`CurveDiagram`] is a 4-valent rotation system together with the single
//! closed traversal of the curve. Internally the traversal is kept as a cyclic
//! list of [`Passage`]s: `arcs[k]` leaves `passages[k]` through its exit slot
//! and enters `passages[k + 1]` through its entry slot. The basepoint is the
//! start of `arcs[0]`. A diagram without crossings is a single free loop.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Stable crossing identifier; never recycled within one script.
    CrossingId
);
id_type!(ArcId);
id_type!(HalfEdgeId);

/// One pass of the curve straight through a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Passage {
    pub crossing: CrossingId,
    /// Slot (0..4, counterclockwise) through which the curve enters.
    pub entry: u8,
}

impl Passage {
    pub fn new(crossing: CrossingId, entry: u8) -> Self {
        Passage { crossing, entry: entry % 4 }
    }

    pub fn exit(&self) -> u8 {
        (self.entry + 2) % 4
    }
}

/// Side of an oriented arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A half-edge seen as a dart leaving its crossing along its arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub crossing: CrossingId,
    pub slot: u8,
}

/// Which end of an oriented arc a slot sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcEnd {
    Start,
    End,
}

/// A face of the rotation system, listed by the darts whose face it is and by
/// the arc sides on its boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<Dart>,
    pub sides: Vec<(ArcId, Side)>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn crossings(&self) -> BTreeSet<CrossingId> {
        self.darts.iter().map(|d| d.crossing).collect()
    }
}

/// All faces of a diagram plus a lookup from arc sides.
#[derive(Clone, Debug)]
pub struct FaceMap {
    pub faces: Vec<Face>,
    by_side: HashMap<(ArcId, Side), usize>,
}

impl FaceMap {
    pub fn face_of(&self, arc: ArcId, side: Side) -> Option<usize> {
        self.by_side.get(&(arc, side)).copied()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("invalid diagram: {0}")]
    Invalid(ValidationReport),
    #[error("unknown crossing {0}")]
    UnknownCrossing(CrossingId),
}

/// One violated diagram invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    NotFourValent { detail: String },
    MultipleComponents { components: usize },
    NonTransversalPassage { crossing: CrossingId },
    EulerMismatch { vertices: i64, edges: i64, faces: i64, expected: i64 },
    Malformed { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotFourValent { detail } => write!(f, "NotFourValent: {detail}"),
            Violation::MultipleComponents { components } => {
                write!(f, "MultipleComponents: traversal splits into {components} cycles")
            }
            Violation::NonTransversalPassage { crossing } => {
                write!(f, "NonTransversalPassage at crossing {crossing}")
            }
            Violation::EulerMismatch { vertices, edges, faces, expected } => write!(
                f,
                "EulerMismatch: V - E + F = {vertices} - {edges} + {faces} != {expected}"
            ),
            Violation::Malformed { detail } => write!(f, "Malformed: {detail}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingJson {
    pub id: CrossingId,
    pub slots: Vec<HalfEdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcJson {
    pub id: ArcId,
    pub ends: [HalfEdgeId; 2],
}

/// Wire form of a diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    pub crossings: Vec<CrossingJson>,
    pub arcs: Vec<ArcJson>,
    pub basepoint: HalfEdgeId,
    #[serde(default)]
    pub genus: u32,
}

#[derive(Clone, Debug)]
pub struct CurveDiagram {
    crossings: BTreeMap<CrossingId, [HalfEdgeId; 4]>,
    passages: Vec<Passage>,
    arcs: Vec<ArcId>,
    loop_ends: Option<[HalfEdgeId; 2]>,
    genus: u32,
    visits: BTreeMap<CrossingId, [usize; 2]>,
    arc_index: HashMap<ArcId, usize>,
    next_arc: u32,
    next_half_edge: u32,
}

impl PartialEq for CurveDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.crossings == other.crossings
            && self.passages == other.passages
            && self.arcs == other.arcs
            && self.loop_ends == other.loop_ends
            && self.genus == other.genus
    }
}

impl CurveDiagram {
    /// The planar circle with a single arc.
    pub fn circle() -> Self {
        Self::free_loop(ArcId(0), [HalfEdgeId(0), HalfEdgeId(1)], 0)
    }

    pub(crate) fn free_loop(arc: ArcId, ends: [HalfEdgeId; 2], genus: u32) -> Self {
        let mut d = CurveDiagram {
            crossings: BTreeMap::new(),
            passages: Vec::new(),
            arcs: vec![arc],
            loop_ends: Some(ends),
            genus,
            visits: BTreeMap::new(),
            arc_index: HashMap::new(),
            next_arc: 0,
            next_half_edge: 0,
        };
        d.reindex();
        d
    }

    /// Assemble a diagram from its traversal and check every invariant.
    pub(crate) fn from_traversal(
        crossings: BTreeMap<CrossingId, [HalfEdgeId; 4]>,
        passages: Vec<Passage>,
        arcs: Vec<ArcId>,
        genus: u32,
        counters: (u32, u32),
    ) -> Result<Self, DiagramError> {
        let mut d = CurveDiagram {
            crossings,
            passages,
            arcs,
            loop_ends: None,
            genus,
            visits: BTreeMap::new(),
            arc_index: HashMap::new(),
            next_arc: counters.0,
            next_half_edge: counters.1,
        };
        if d.passages.is_empty() {
            return Err(DiagramError::Invalid(ValidationReport {
                violations: vec![Violation::Malformed {
                    detail: "traversal without passages must be a free loop".into(),
                }],
            }));
        }
        d.reindex();
        let report = d.check_invariants();
        if report.is_valid() {
            Ok(d)
        } else {
            Err(DiagramError::Invalid(report))
        }
    }

    fn reindex(&mut self) {
        self.visits.clear();
        let mut partial: BTreeMap<CrossingId, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.passages.iter().enumerate() {
            partial.entry(p.crossing).or_default().push(i);
        }
        for (c, v) in partial {
            if v.len() == 2 {
                self.visits.insert(c, [v[0], v[1]]);
            }
        }
        self.arc_index = self.arcs.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let max_arc = self.arcs.iter().map(|a| a.0 + 1).max().unwrap_or(0);
        let max_he = self
            .crossings
            .values()
            .flatten()
            .chain(self.loop_ends.iter().flatten())
            .map(|h| h.0 + 1)
            .max()
            .unwrap_or(0);
        self.next_arc = self.next_arc.max(max_arc);
        self.next_half_edge = self.next_half_edge.max(max_he);
    }

    fn check_invariants(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen = BTreeMap::new();
        for p in &self.passages {
            if !self.crossings.contains_key(&p.crossing) {
                violations.push(Violation::Malformed {
                    detail: format!("passage through unknown crossing {}", p.crossing),
                });
            }
            seen.entry(p.crossing).or_insert_with(Vec::new).push(p.entry);
        }
        for c in self.crossings.keys() {
            match seen.get(c).map(|v| v.as_slice()) {
                Some([a, b]) if (a + 4 - b) % 2 == 1 => {}
                Some([_, _]) => violations.push(Violation::NonTransversalPassage { crossing: *c }),
                _ => violations.push(Violation::MultipleComponents { components: 2 }),
            }
        }
        if self.arcs.len() != self.passages.len().max(1) {
            violations.push(Violation::Malformed {
                detail: "arc count differs from passage count".into(),
            });
        }
        let unique: BTreeSet<_> = self.arcs.iter().collect();
        if unique.len() != self.arcs.len() {
            violations.push(Violation::Malformed { detail: "duplicate arc id".into() });
        }
        if violations.is_empty() {
            let (v, e, f) = self.euler_counts();
            let expected = 2 - 2 * self.genus as i64;
            if v - e + f != expected {
                violations.push(Violation::EulerMismatch { vertices: v, edges: e, faces: f, expected });
            }
        }
        ValidationReport { violations }
    }

    pub fn from_json(json: &DiagramJson) -> Result<Self, DiagramError> {
        let (report, diagram) = build_from_json(json);
        match diagram {
            Some(d) if report.is_valid() => Ok(d),
            _ => Err(DiagramError::Invalid(report)),
        }
    }

    pub fn to_json(&self) -> DiagramJson {
        let crossings = self
            .crossings
            .iter()
            .map(|(id, slots)| CrossingJson { id: *id, slots: slots.to_vec() })
            .collect();
        let arcs = (0..self.arcs.len())
            .map(|k| {
                let (s, e) = self.arc_half_edges(k);
                ArcJson { id: self.arcs[k], ends: [s, e] }
            })
            .collect();
        DiagramJson { crossings, arcs, basepoint: self.arc_half_edges(0).0, genus: self.genus }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossing_ids(&self) -> Vec<CrossingId> {
        self.crossings.keys().copied().collect()
    }

    pub fn has_crossing(&self, c: CrossingId) -> bool {
        self.crossings.contains_key(&c)
    }

    pub fn slots(&self, c: CrossingId) -> Option<&[HalfEdgeId; 4]> {
        self.crossings.get(&c)
    }

    pub(crate) fn crossing_map(&self) -> &BTreeMap<CrossingId, [HalfEdgeId; 4]> {
        &self.crossings
    }

    pub fn passages(&self) -> &[Passage] {
        &self.passages
    }

    /// Arc ids in traversal order; `arcs()[k]` leaves `passages()[k]`.
    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn arc_position(&self, arc: ArcId) -> Option<usize> {
        self.arc_index.get(&arc).copied()
    }

    pub fn is_free_loop(&self) -> bool {
        self.passages.is_empty()
    }

    /// Traversal indices of the two passages through `c`, in traversal order.
    pub fn visits(&self, c: CrossingId) -> Option<[usize; 2]> {
        self.visits.get(&c).copied()
    }

    pub(crate) fn counters(&self) -> (u32, u32) {
        (self.next_arc, self.next_half_edge)
    }

    /// Half-edge ids at the start and end of the arc at traversal position `k`.
    pub fn arc_half_edges(&self, k: usize) -> (HalfEdgeId, HalfEdgeId) {
        if let Some(ends) = self.loop_ends {
            return (ends[0], ends[1]);
        }
        let n = self.passages.len();
        let from = self.passages[k];
        let to = self.passages[(k + 1) % n];
        (
            self.crossings[&from.crossing][from.exit() as usize],
            self.crossings[&to.crossing][to.entry as usize],
        )
    }

    /// Arc position and end occupied by a crossing slot.
    pub fn slot_arc(&self, c: CrossingId, slot: u8) -> Option<(usize, ArcEnd)> {
        let [p, q] = self.visits(c)?;
        let n = self.passages.len();
        let slot = slot % 4;
        for idx in [p, q] {
            let pass = self.passages[idx];
            if pass.exit() == slot {
                return Some((idx, ArcEnd::Start));
            }
            if pass.entry == slot {
                return Some(((idx + n - 1) % n, ArcEnd::End));
            }
        }
        None
    }

    /// Slot at the given end of the arc at position `k`.
    pub fn arc_end_slot(&self, k: usize, end: ArcEnd) -> Option<Dart> {
        if self.is_free_loop() {
            return None;
        }
        let n = self.passages.len();
        Some(match end {
            ArcEnd::Start => {
                let p = self.passages[k];
                Dart { crossing: p.crossing, slot: p.exit() }
            }
            ArcEnd::End => {
                let p = self.passages[(k + 1) % n];
                Dart { crossing: p.crossing, slot: p.entry }
            }
        })
    }

    /// The arc involution: the slot at the far end of this slot's arc.
    pub fn across(&self, d: Dart) -> Dart {
        let (k, end) = self.slot_arc(d.crossing, d.slot).expect("slot of a valid diagram");
        let other = match end {
            ArcEnd::Start => ArcEnd::End,
            ArcEnd::End => ArcEnd::Start,
        };
        self.arc_end_slot(k, other).expect("diagram with crossings")
    }

    /// Faces by tracing `dart -> rotate_ccw(across(dart))`; a face lies to the
    /// right of each of its darts.
    pub fn faces(&self) -> FaceMap {
        let mut faces = Vec::new();
        if self.loop_ends.is_some() {
            let a = self.arcs[0];
            faces.push(Face { darts: vec![], sides: vec![(a, Side::Right)] });
            faces.push(Face { darts: vec![], sides: vec![(a, Side::Left)] });
        } else {
            let mut seen: BTreeSet<Dart> = BTreeSet::new();
            for &c in self.crossings.keys() {
                for slot in 0..4u8 {
                    let start = Dart { crossing: c, slot };
                    if seen.contains(&start) {
                        continue;
                    }
                    let mut darts = Vec::new();
                    let mut sides = Vec::new();
                    let mut d = start;
                    loop {
                        seen.insert(d);
                        darts.push(d);
                        let (k, end) = self.slot_arc(d.crossing, d.slot).unwrap();
                        let side = match end {
                            ArcEnd::Start => Side::Right,
                            ArcEnd::End => Side::Left,
                        };
                        sides.push((self.arcs[k], side));
                        let far = self.across(d);
                        d = Dart { crossing: far.crossing, slot: (far.slot + 1) % 4 };
                        if d == start {
                            break;
                        }
                    }
                    faces.push(Face { darts, sides });
                }
            }
        }
        let mut by_side = HashMap::new();
        for (i, f) in faces.iter().enumerate() {
            for s in &f.sides {
                by_side.insert(*s, i);
            }
        }
        FaceMap { faces, by_side }
    }

    /// (V, E, F) of the cellular embedding; a free loop counts as one vertex.
    pub fn euler_counts(&self) -> (i64, i64, i64) {
        let v = if self.is_free_loop() { 1 } else { self.crossings.len() as i64 };
        let e = self.arcs.len() as i64;
        let f = self.faces().faces.len() as i64;
        (v, e, f)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.euler_counts();
        v - e + f
    }

    /// Arc events of the traversal from the basepoint: each arc followed by
    /// the passage it enters (none for a free loop).
    pub fn traverse(&self) -> Vec<TraversalEvent> {
        let n = self.passages.len();
        (0..self.arcs.len())
            .map(|k| TraversalEvent {
                arc: self.arcs[k],
                enters: if n == 0 { None } else { Some(self.passages[(k + 1) % n]) },
            })
            .collect()
    }

    /// Rotate the traversal so that `arc` is the basepoint arc.
    pub(crate) fn rotate_to(&mut self, arc: ArcId) {
        if let Some(k) = self.arc_position(arc) {
            if !self.is_free_loop() {
                self.passages.rotate_left(k);
                self.arcs.rotate_left(k);
                self.reindex();
            }
        }
    }

    pub(crate) fn bump_counters(&mut self, counters: (u32, u32)) {
        self.next_arc = self.next_arc.max(counters.0);
        self.next_half_edge = self.next_half_edge.max(counters.1);
    }

    pub(crate) fn fresh_arc(&mut self) -> ArcId {
        let a = ArcId(self.next_arc);
        self.next_arc += 1;
        a
    }

    pub(crate) fn fresh_half_edges<const N: usize>(&mut self) -> [HalfEdgeId; N] {
        let mut out = [HalfEdgeId(0); N];
        for h in out.iter_mut() {
            *h = HalfEdgeId(self.next_half_edge);
            self.next_half_edge += 1;
        }
        out
    }

    /// Canonical word of the traversal read from position `start`, optionally
    /// reversed, with crossings relabelled by first appearance.
    fn canonical_word(&self, start: usize, reversed: bool) -> (Vec<(u32, u8)>, Vec<CrossingId>) {
        let n = self.passages.len();
        let seq: Vec<Passage> = (0..n)
            .map(|i| {
                if reversed {
                    let p = self.passages[(start + n - i) % n];
                    Passage::new(p.crossing, p.exit())
                } else {
                    self.passages[(start + i) % n]
                }
            })
            .collect();
        let mut label: HashMap<CrossingId, (u32, u8)> = HashMap::new();
        let mut order = Vec::new();
        let mut word = Vec::with_capacity(n);
        for p in &seq {
            match label.get(&p.crossing) {
                None => {
                    label.insert(p.crossing, (order.len() as u32, p.entry));
                    order.push(p.crossing);
                    word.push((label[&p.crossing].0, 0));
                }
                Some(&(l, first_entry)) => {
                    // 1 or 3: which side the second strand enters from
                    word.push((l, (p.entry + 4 - first_entry) % 4));
                }
            }
        }
        (word, order)
    }

    /// All crossing bijections carrying `self` onto `other` that preserve the
    /// rotation system and the traversal. With `allow_reversal` the traversal
    /// direction may flip.
    pub fn isomorphisms(
        &self,
        other: &CurveDiagram,
        allow_reversal: bool,
    ) -> Vec<BTreeMap<CrossingId, CrossingId>> {
        if self.passages.len() != other.passages.len() || self.genus != other.genus {
            return vec![];
        }
        if self.is_free_loop() {
            return vec![BTreeMap::new()];
        }
        let (target, target_order) = other.canonical_word(0, false);
        let n = self.passages.len();
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for reversed in [false, true] {
            if reversed && !allow_reversal {
                continue;
            }
            for start in 0..n {
                let (word, order) = self.canonical_word(start, reversed);
                if word == target {
                    let map: BTreeMap<CrossingId, CrossingId> =
                        order.iter().copied().zip(target_order.iter().copied()).collect();
                    if seen.insert(map.clone()) {
                        out.push(map);
                    }
                }
            }
        }
        out
    }

    pub fn is_isomorphic(&self, other: &CurveDiagram) -> bool {
        !self.isomorphisms(other, true).is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraversalEvent {
    pub arc: ArcId,
    pub enters: Option<Passage>,
}

/// Check every diagram invariant of a wire-form diagram.
pub fn validate_diagram(json: &DiagramJson) -> ValidationReport {
    build_from_json(json).0
}

fn build_from_json(json: &DiagramJson) -> (ValidationReport, Option<CurveDiagram>) {
    let mut violations = Vec::new();
    let mut slot_of: HashMap<HalfEdgeId, (CrossingId, u8)> = HashMap::new();
    let mut crossings = BTreeMap::new();
    for c in &json.crossings {
        if c.slots.len() != 4 {
            violations.push(Violation::NotFourValent {
                detail: format!("crossing {} has {} slots", c.id, c.slots.len()),
            });
            continue;
        }
        if crossings.contains_key(&c.id) {
            violations.push(Violation::Malformed { detail: format!("duplicate crossing id {}", c.id) });
            continue;
        }
        let mut slots = [HalfEdgeId(0); 4];
        for (i, h) in c.slots.iter().enumerate() {
            slots[i] = *h;
            if slot_of.insert(*h, (c.id, i as u8)).is_some() {
                violations.push(Violation::NotFourValent {
                    detail: format!("half-edge {h} appears in more than one slot"),
                });
            }
        }
        crossings.insert(c.id, slots);
    }
    let mut arc_of: HashMap<HalfEdgeId, (usize, usize)> = HashMap::new();
    let mut arc_ids = BTreeSet::new();
    for (i, a) in json.arcs.iter().enumerate() {
        if !arc_ids.insert(a.id) {
            violations.push(Violation::Malformed { detail: format!("duplicate arc id {}", a.id) });
        }
        for (e, h) in a.ends.iter().enumerate() {
            if arc_of.insert(*h, (i, e)).is_some() {
                violations.push(Violation::NotFourValent {
                    detail: format!("half-edge {h} is the end of more than one arc"),
                });
            }
        }
    }
    for h in slot_of.keys() {
        if !arc_of.contains_key(h) {
            violations.push(Violation::NotFourValent { detail: format!("slot {h} has no arc") });
        }
    }
    for a in &json.arcs {
        let [x, y] = a.ends;
        if let (Some((c1, s1)), Some((c2, s2))) = (slot_of.get(&x), slot_of.get(&y)) {
            if c1 == c2 && (s1 + 2) % 4 == *s2 {
                violations.push(Violation::NonTransversalPassage { crossing: *c1 });
            }
        }
    }
    if !violations.is_empty() {
        return (ValidationReport { violations }, None);
    }

    let free_arcs: Vec<&ArcJson> = json
        .arcs
        .iter()
        .filter(|a| !slot_of.contains_key(&a.ends[0]) && !slot_of.contains_key(&a.ends[1]))
        .collect();
    let half_free = json
        .arcs
        .iter()
        .any(|a| slot_of.contains_key(&a.ends[0]) != slot_of.contains_key(&a.ends[1]));
    if half_free {
        violations.push(Violation::NotFourValent { detail: "arc with a dangling end".into() });
        return (ValidationReport { violations }, None);
    }

    if crossings.is_empty() {
        if json.arcs.len() != 1 {
            violations.push(Violation::MultipleComponents { components: json.arcs.len() });
            return (ValidationReport { violations }, None);
        }
        let a = &json.arcs[0];
        let ends = if a.ends[0] == json.basepoint {
            a.ends
        } else if a.ends[1] == json.basepoint {
            [a.ends[1], a.ends[0]]
        } else {
            violations.push(Violation::Malformed { detail: "basepoint is not an arc end".into() });
            return (ValidationReport { violations }, None);
        };
        let d = CurveDiagram::free_loop(a.id, ends, json.genus);
        if d.genus != 0 {
            let (v, e, f) = d.euler_counts();
            violations.push(Violation::EulerMismatch {
                vertices: v,
                edges: e,
                faces: f,
                expected: 2 - 2 * json.genus as i64,
            });
            return (ValidationReport { violations }, None);
        }
        return (ValidationReport { violations }, Some(d));
    }

    let Some(&(bc, bs)) = slot_of.get(&json.basepoint) else {
        violations.push(Violation::Malformed { detail: "basepoint is not a crossing slot".into() });
        return (ValidationReport { violations }, None);
    };

    // Walk the traversal from the basepoint, passing straight through crossings.
    let mut passages = Vec::new();
    let mut arcs = Vec::new();
    let mut visited_arcs = BTreeSet::new();
    let mut cur = (bc, bs);
    loop {
        let h = crossings[&cur.0][cur.1 as usize];
        let (ai, end) = arc_of[&h];
        let arc = &json.arcs[ai];
        if !visited_arcs.insert(ai) {
            break;
        }
        passages.push(Passage::new(cur.0, cur.1 + 2));
        arcs.push(arc.id);
        let far = arc.ends[1 - end];
        let (c2, s2) = slot_of[&far];
        cur = (c2, (s2 + 2) % 4);
        if cur == (bc, bs) {
            break;
        }
    }
    let mut per_crossing: BTreeMap<CrossingId, usize> = BTreeMap::new();
    for p in &passages {
        *per_crossing.entry(p.crossing).or_default() += 1;
    }
    let complete = visited_arcs.len() == json.arcs.len()
        && free_arcs.is_empty()
        && crossings.keys().all(|c| per_crossing.get(c) == Some(&2));
    if !complete {
        violations.push(Violation::MultipleComponents {
            components: count_cycles(json, &slot_of, &arc_of, &crossings),
        });
        return (ValidationReport { violations }, None);
    }
    match CurveDiagram::from_traversal(crossings, passages, arcs, json.genus, (0, 0)) {
        Ok(d) => (ValidationReport { violations }, Some(d)),
        Err(DiagramError::Invalid(r)) => (r, None),
        Err(e) => (
            ValidationReport { violations: vec![Violation::Malformed { detail: e.to_string() }] },
            None,
        ),
    }
}

fn count_cycles(
    json: &DiagramJson,
    slot_of: &HashMap<HalfEdgeId, (CrossingId, u8)>,
    arc_of: &HashMap<HalfEdgeId, (usize, usize)>,
    crossings: &BTreeMap<CrossingId, [HalfEdgeId; 4]>,
) -> usize {
    let mut seen = vec![false; json.arcs.len()];
    let mut cycles = 0;
    for start in 0..json.arcs.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut ai = start;
        let mut end = 1;
        loop {
            seen[ai] = true;
            let h = json.arcs[ai].ends[end];
            let Some(&(c, s)) = slot_of.get(&h) else { break };
            let next_h = crossings[&c][((s + 2) % 4) as usize];
            let (na, ne) = arc_of[&next_h];
            if seen[na] {
                break;
            }
            ai = na;
            end = 1 - ne;
        }
    }
    cycles
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn circle_is_valid_with_two_faces() {
        let d = CurveDiagram::from_json(&circle()).unwrap();
        assert_eq!(d.euler_counts(), (1, 1, 2));
        assert_eq!(d.euler_characteristic(), 2);
        assert_eq!(d.traverse().len(), 1);
        assert!(d.traverse()[0].enters.is_none());
    }

    #[test]
    fn kink_counts() {
        let d = CurveDiagram::from_json(&kink()).unwrap();
        assert_eq!(d.euler_counts(), (1, 2, 3));
        let events = d.traverse();
        assert_eq!(events.len(), 2);
        let passes: Vec<_> = events.iter().map(|e| e.enters.unwrap()).collect();
        assert_eq!(passes[0].crossing, passes[1].crossing);
        assert_eq!((passes[0].entry + 4 - passes[1].entry) % 2, 1);
    }

    #[test]
    fn two_loops_are_multiple_components() {
        let json: DiagramJson = serde_json::from_str(
            r#"{"crossings":[],"arcs":[{"id":0,"ends":[0,1]},{"id":1,"ends":[2,3]}],"basepoint":0}"#,
        )
        .unwrap();
        let r = validate_diagram(&json);
        assert!(matches!(r.violations[0], Violation::MultipleComponents { components: 2 }));
    }

    #[test]
    fn three_slot_crossing_is_rejected() {
        let json: DiagramJson = serde_json::from_str(
            r#"{"crossings":[{"id":1,"slots":[10,11,12]}],"arcs":[{"id":1,"ends":[10,11]}],"basepoint":10}"#,
        )
        .unwrap();
        let r = validate_diagram(&json);
        assert!(matches!(r.violations[0], Violation::NotFourValent { .. }));
    }

    #[test]
    fn opposite_slot_arc_is_non_transversal() {
        let json: DiagramJson = serde_json::from_str(
            r#"{"crossings":[{"id":1,"slots":[10,11,12,13]}],
                "arcs":[{"id":1,"ends":[10,12]},{"id":2,"ends":[11,13]}],"basepoint":10}"#,
        )
        .unwrap();
        let r = validate_diagram(&json);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonTransversalPassage { .. })));
    }

    #[test]
    fn kink_with_wrong_genus_fails_euler() {
        let mut json = kink();
        json.genus = 1;
        let r = validate_diagram(&json);
        assert!(matches!(r.violations[0], Violation::EulerMismatch { .. }));
    }

    #[test]
    fn json_round_trip_preserves_diagram() {
        let d = CurveDiagram::from_json(&kink()).unwrap();
        let back = CurveDiagram::from_json(&d.to_json()).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn kink_is_isomorphic_to_relabelled_copy() {
        let d = CurveDiagram::from_json(&kink()).unwrap();
        let relabelled: DiagramJson = serde_json::from_str(
            r#"{"crossings":[{"id":7,"slots":[1,2,3,4]}],
                "arcs":[{"id":5,"ends":[3,4]},{"id":6,"ends":[2,1]}],
                "basepoint":2}"#,
        )
        .unwrap();
        let e = CurveDiagram::from_json(&relabelled).unwrap();
        assert!(d.is_isomorphic(&e));
    }
}
