//! Turning a sequence of generic keyframes into a move script.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{dist, extract_diagram, Extracted, GeometryError, Point, PolylineFrame, PolylineHomotopy};
use crate::diagram::{CrossingId, CurveDiagram};
use crate::moves::{apply_move, candidate_moves, HomotopyScript, ReidemeisterMove, Terminal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EventKind {
    R1plus,
    R1minus,
    R2plus,
    R2minus,
    R3,
    #[serde(rename = "none")]
    Nothing,
}

impl EventKind {
    fn of(m: &ReidemeisterMove) -> Self {
        match m {
            ReidemeisterMove::R1Plus { .. } => EventKind::R1plus,
            ReidemeisterMove::R1Minus { .. } => EventKind::R1minus,
            ReidemeisterMove::R2Plus { .. } => EventKind::R2plus,
            ReidemeisterMove::R2Minus { .. } => EventKind::R2minus,
            ReidemeisterMove::R3 { .. } => EventKind::R3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventLogEntry {
    pub gap: (usize, usize),
    pub event: EventKind,
    /// Script crossings the move creates or acts on.
    pub crossings: Vec<CrossingId>,
    /// Mean position of those crossings.
    pub location: Option<Point>,
}

/// The frame a script level was read from, and which frame crossing each
/// script crossing is.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelAnchor {
    pub frame: usize,
    pub crossings: BTreeMap<CrossingId, CrossingId>,
}

#[derive(Clone, Debug)]
pub struct Detection {
    pub script: HomotopyScript,
    pub log: Vec<EventLogEntry>,
    pub levels: Vec<LevelAnchor>,
    pub frames: Vec<PolylineFrame>,
    pub extracted: Vec<Extracted>,
    /// For every frame, its script level and crossing correspondence.
    pub frame_anchors: Vec<(usize, BTreeMap<CrossingId, CrossingId>)>,
}

/// Incremental event detection: feed frames in time order.
pub struct Detector {
    initial: CurveDiagram,
    current: CurveDiagram,
    coords: BTreeMap<CrossingId, Point>,
    fresh: u32,
    moves: Vec<ReidemeisterMove>,
    log: Vec<EventLogEntry>,
    levels: Vec<LevelAnchor>,
    frames: Vec<PolylineFrame>,
    extracted: Vec<Extracted>,
    frame_anchors: Vec<(usize, BTreeMap<CrossingId, CrossingId>)>,
    /// Largest distance a surviving crossing may move between frames.
    pub max_displacement: Option<f64>,
}

struct Choice {
    mv: Option<ReidemeisterMove>,
    diagram: CurveDiagram,
    map: BTreeMap<CrossingId, CrossingId>,
    score: f64,
    worst: f64,
}

impl Detector {
    pub fn new(first: PolylineFrame) -> Result<Self, GeometryError> {
        let e = extract_diagram(&first)?;
        let coords = e.anchors.iter().map(|(c, a)| (*c, a.point)).collect();
        let ids: BTreeMap<CrossingId, CrossingId> = e.anchors.keys().map(|c| (*c, *c)).collect();
        let fresh = e.anchors.keys().last().map_or(1, |c| c.0 + 1);
        Ok(Detector {
            initial: e.diagram.clone(),
            current: e.diagram.clone(),
            coords,
            fresh,
            moves: Vec::new(),
            log: Vec::new(),
            levels: vec![LevelAnchor { frame: 0, crossings: ids.clone() }],
            frames: vec![first],
            extracted: vec![e],
            frame_anchors: vec![(0, ids)],
            max_displacement: None,
        })
    }

    pub fn current(&self) -> &CurveDiagram {
        &self.current
    }

    /// Best way to carry `from` onto the frame's diagram.
    fn best_match(&self, from: &CurveDiagram, e: &Extracted) -> Option<(BTreeMap<CrossingId, CrossingId>, f64, f64)> {
        let mut best: Option<(BTreeMap<CrossingId, CrossingId>, f64, f64)> = None;
        for map in from.isomorphisms(&e.diagram, false) {
            let mut score = 0.0;
            let mut worst: f64 = 0.0;
            for (c, target) in &map {
                if let Some(p) = self.coords.get(c) {
                    let d = dist(*p, e.anchors[target].point);
                    score += d;
                    worst = worst.max(d);
                }
            }
            if best.as_ref().is_none_or(|b| score < b.1) {
                best = Some((map, score, worst));
            }
        }
        best
    }

    /// Read the next frame and record at most one move.
    pub fn advance(&mut self, frame: PolylineFrame) -> Result<EventKind, GeometryError> {
        let gap = (self.frames.len() - 1, self.frames.len());
        let e = extract_diagram(&frame)?;
        let delta = e.diagram.crossing_count() as i64 - self.current.crossing_count() as i64;
        let mut choice: Option<Choice> = None;
        if delta == 0 {
            if let Some((map, score, worst)) = self.best_match(&self.current, &e) {
                choice = Some(Choice { mv: None, diagram: self.current.clone(), map, score, worst });
            }
        }
        if choice.is_none() && delta.abs() <= 2 {
            for m in candidate_moves(&self.current, self.fresh) {
                if m.crossing_delta() != delta {
                    continue;
                }
                let Ok(out) = apply_move(&self.current, &m) else { continue };
                if let Some((map, score, worst)) = self.best_match(&out.diagram, &e) {
                    if choice.as_ref().is_none_or(|c| score < c.score) {
                        choice = Some(Choice { mv: Some(m), diagram: out.diagram, map, score, worst });
                    }
                }
            }
        }
        let Some(choice) = choice else {
            return Err(GeometryError::AmbiguousGap(gap.0, gap.1));
        };
        if let Some(limit) = self.max_displacement {
            if choice.worst > limit {
                return Err(GeometryError::MatchFailure(
                    gap.0,
                    gap.1,
                    format!("a crossing moved {} (limit {limit})", choice.worst),
                ));
            }
        }

        let old_coords = std::mem::take(&mut self.coords);
        self.coords = choice.map.iter().map(|(c, t)| (*c, e.anchors[t].point)).collect();
        let kind = match &choice.mv {
            None => EventKind::Nothing,
            Some(m) => {
                let crossings = match m {
                    ReidemeisterMove::R1Minus { crossing } => vec![*crossing],
                    ReidemeisterMove::R2Minus { crossings } => crossings.to_vec(),
                    ReidemeisterMove::R3 { crossings, .. } => crossings.to_vec(),
                    other => other.new_crossings(),
                };
                let pts: Vec<Point> = crossings
                    .iter()
                    .filter_map(|c| self.coords.get(c).or_else(|| old_coords.get(c)).copied())
                    .collect();
                let location = (!pts.is_empty()).then(|| {
                    let k = pts.len() as f64;
                    [pts.iter().map(|p| p[0]).sum::<f64>() / k, pts.iter().map(|p| p[1]).sum::<f64>() / k]
                });
                self.log.push(EventLogEntry { gap, event: EventKind::of(m), crossings, location });
                self.moves.push(m.clone());
                self.fresh += 2;
                self.levels.push(LevelAnchor { frame: gap.1, crossings: choice.map.clone() });
                EventKind::of(m)
            }
        };
        if kind == EventKind::Nothing {
            self.log.push(EventLogEntry { gap, event: kind, crossings: vec![], location: None });
        }
        self.current = choice.diagram;
        self.frame_anchors.push((self.moves.len(), choice.map));
        self.frames.push(frame);
        self.extracted.push(e);
        Ok(kind)
    }

    pub fn finish(self, terminal: Terminal) -> Detection {
        Detection {
            script: HomotopyScript::new(&self.initial, self.moves, terminal),
            log: self.log,
            levels: self.levels,
            frames: self.frames,
            extracted: self.extracted,
            frame_anchors: self.frame_anchors,
        }
    }
}

/// Read a move script off keyframes, one move per gap at most.
pub fn detect_events(h: &PolylineHomotopy) -> Result<Detection, GeometryError> {
    h.check()?;
    let Some(first) = h.frames.first() else {
        return Err(GeometryError::TooFewPoints(0));
    };
    let mut det = Detector::new(first.clone())?;
    for f in &h.frames[1..] {
        det.advance(f.clone())?;
    }
    Ok(det.finish(Terminal::Curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::elaborate_script;

    fn circle(n: usize, r: f64, t: f64) -> PolylineFrame {
        let pts = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        PolylineFrame::new(t, pts)
    }

    #[test]
    fn identical_frames_are_no_event() {
        let h = PolylineHomotopy { frames: vec![circle(8, 1.0, 0.0), circle(8, 1.0, 1.0)] };
        let d = detect_events(&h).unwrap();
        assert!(d.script.moves.is_empty());
        assert_eq!(d.log[0].event, EventKind::Nothing);
    }

    #[test]
    fn added_kink_is_one_r1() {
        let a = PolylineFrame::new(0.0, vec![[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [0.0, 3.0]]);
        // a small loop on the bottom edge
        let b = PolylineFrame::new(
            1.0,
            vec![[0.0, 0.0], [2.0, 0.0], [2.5, 0.6], [1.8, 0.6], [2.3, -0.2], [4.0, 0.0], [4.0, 3.0], [0.0, 3.0]],
        );
        let d = detect_events(&PolylineHomotopy { frames: vec![a, b.clone()] }).unwrap();
        assert_eq!(d.log.len(), 1);
        assert_eq!(d.log[0].event, EventKind::R1plus);
        let e = elaborate_script(&d.script).unwrap();
        assert_eq!(e.crossing_counts(), vec![0, 1]);
        assert!(e.levels[1].is_isomorphic(&extract_diagram(&b).unwrap().diagram));
    }

    #[test]
    fn three_kinks_in_one_gap_are_ambiguous() {
        let a = PolylineFrame::new(0.0, vec![[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [0.0, 3.0]]);
        let b = PolylineFrame::new(
            1.0,
            vec![
                [0.0, 0.0],
                [1.0, 0.0],
                [1.5, 0.6],
                [0.8, 0.6],
                [1.3, -0.2],
                [3.0, 0.0],
                [3.5, 0.6],
                [2.8, 0.6],
                [3.3, -0.2],
                [3.5, 0.0],
                [3.8, 0.4],
                [3.6, 0.4],
                [3.7, -0.1],
                [4.0, 0.0],
                [4.0, 3.0],
                [0.0, 3.0],
            ],
        );
        assert!(matches!(
            detect_events(&PolylineHomotopy { frames: vec![a, b] }),
            Err(GeometryError::AmbiguousGap(0, 1))
        ));
    }
}
