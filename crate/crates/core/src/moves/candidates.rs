use std::collections::BTreeSet;

use crate::diagram::{ArcId, CrossingId, CurveDiagram, Side};

use super::{bigon_arcs, RelativeOrientation, ReidemeisterMove};

/// Every move whose operands and face preconditions hold on `d`, in a
/// deterministic order. Moves that create crossings use ids starting at
/// `fresh`.
pub fn candidate_moves(d: &CurveDiagram, fresh: u32) -> Vec<ReidemeisterMove> {
    let c1 = CrossingId(fresh);
    let c2 = CrossingId(fresh + 1);
    let mut out = Vec::new();
    let faces = d.faces();

    for &arc in d.arcs() {
        for side in [Side::Left, Side::Right] {
            out.push(ReidemeisterMove::R1Plus { arc, side, new_crossing: c1 });
        }
    }

    let n = d.passages().len();
    for c in d.crossing_ids() {
        let [p, q] = d.visits(c).unwrap();
        let loop_pos = if q == p + 1 {
            Some(p)
        } else if p == 0 && q == n - 1 {
            Some(n - 1)
        } else {
            None
        };
        if let Some(k) = loop_pos {
            let arc = d.arcs()[k];
            let monogon = [Side::Left, Side::Right]
                .iter()
                .any(|s| faces.face_of(arc, *s).map(|f| faces.faces[f].len()) == Some(1));
            if monogon {
                out.push(ReidemeisterMove::R1Minus { crossing: c });
            }
        }
    }

    let mut seen_r2 = BTreeSet::new();
    for face in &faces.faces {
        for i in 0..face.sides.len() {
            for j in i..face.sides.len() {
                let (a, sa) = face.sides[i];
                let (b, sb) = face.sides[j];
                let orientation = if sa == sb {
                    RelativeOrientation::Antiparallel
                } else {
                    RelativeOrientation::Parallel
                };
                if i == j && a != b {
                    continue;
                }
                if a == b && orientation == RelativeOrientation::Parallel {
                    continue;
                }
                if !seen_r2.insert((a, b, sa, orientation)) {
                    continue;
                }
                out.push(ReidemeisterMove::R2Plus {
                    arcs: [a, b],
                    orientation,
                    side: Some(sa),
                    new_crossings: [c1, c2],
                });
            }
        }
    }

    let ids = d.crossing_ids();
    for (i, &x) in ids.iter().enumerate() {
        for &y in &ids[i + 1..] {
            if bigon_arcs(d, x, y).is_some() {
                out.push(ReidemeisterMove::R2Minus { crossings: [x, y] });
            }
        }
    }

    for face in &faces.faces {
        if face.len() != 3 {
            continue;
        }
        let crossings: Vec<CrossingId> = face.crossings().into_iter().collect();
        let arcs: BTreeSet<ArcId> = face.sides.iter().map(|s| s.0).collect();
        if crossings.len() == 3 && arcs.len() == 3 {
            let arcs: Vec<ArcId> = arcs.into_iter().collect();
            out.push(ReidemeisterMove::R3 {
                crossings: [crossings[0], crossings[1], crossings[2]],
                face: [arcs[0], arcs[1], arcs[2]],
            });
        }
    }
    out
}
