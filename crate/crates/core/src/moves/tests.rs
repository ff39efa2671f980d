use proptest::prelude::*;

use super::*;
use crate::diagram::fixtures::{circle, kink};

fn count_faces(d: &CurveDiagram, len: usize) -> usize {
    d.faces().faces.iter().filter(|f| f.len() == len).count()
}

fn has_monogon_at(d: &CurveDiagram, c: CrossingId) -> bool {
    d.faces().faces.iter().any(|f| f.len() == 1 && f.darts[0].crossing == c)
}

fn next_id(d: &CurveDiagram) -> u32 {
    d.crossing_ids().iter().map(|c| c.0 + 1).max().unwrap_or(1)
}

/// Random walk through candidate moves, biased toward small diagrams.
fn random_walk(choices: &[u16], max_crossings: usize) -> Vec<CurveDiagram> {
    let mut d = CurveDiagram::from_json(&circle()).unwrap();
    let mut out = vec![d.clone()];
    let mut fresh = 1;
    for &pick in choices {
        let cands: Vec<_> = candidate_moves(&d, fresh)
            .into_iter()
            .filter(|m| d.crossing_count() as i64 + m.crossing_delta() <= max_crossings as i64)
            .collect();
        let m = &cands[pick as usize % cands.len()];
        let o = apply_move(&d, m).unwrap_or_else(|e| panic!("{m:?} on {:?}: {e}", d.to_json()));
        fresh += 2;
        d = o.diagram;
        out.push(d.clone());
    }
    out
}

#[test]
fn r2_on_circle_gives_bigon() {
    let d = CurveDiagram::from_json(&circle()).unwrap();
    let m = ReidemeisterMove::R2Plus {
        arcs: [ArcId(0), ArcId(0)],
        orientation: RelativeOrientation::Antiparallel,
        side: None,
        new_crossings: [CrossingId(1), CrossingId(2)],
    };
    let o = apply_move(&d, &m).unwrap();
    let b = o.diagram;
    assert_eq!(b.crossing_count(), 2);
    assert_eq!(b.arcs().len(), 4);
    let mut word: Vec<u32> = b.passages().iter().map(|p| p.crossing.0).collect();
    while word[0] != 1 || word[1] != 2 {
        word.rotate_left(1);
    }
    assert_eq!(word, vec![1, 2, 2, 1]);
    // the tip bigon, two side monogons, and the outside
    assert_eq!(count_faces(&b, 1), 2);
    assert_eq!(count_faces(&b, 2), 1);
    assert!(bigon_arcs(&b, CrossingId(1), CrossingId(2)).is_some());
}

#[test]
fn r1_plus_then_minus_is_identity_up_to_isomorphism() {
    let d = CurveDiagram::from_json(&kink()).unwrap();
    for &arc in d.arcs() {
        for side in [Side::Left, Side::Right] {
            let up = apply_move(&d, &ReidemeisterMove::R1Plus { arc, side, new_crossing: CrossingId(9) })
                .unwrap();
            assert_eq!(up.diagram.faces().faces.len(), d.faces().faces.len() + 1);
            assert!(has_monogon_at(&up.diagram, CrossingId(9)));
            let down =
                apply_move(&up.diagram, &ReidemeisterMove::R1Minus { crossing: CrossingId(9) }).unwrap();
            assert!(down.diagram.is_isomorphic(&d));
        }
    }
}

#[test]
fn r1_minus_on_non_monogon_fails() {
    let d = CurveDiagram::from_json(&circle()).unwrap();
    let m = ReidemeisterMove::R2Plus {
        arcs: [ArcId(0), ArcId(0)],
        orientation: RelativeOrientation::Antiparallel,
        side: None,
        new_crossings: [CrossingId(1), CrossingId(2)],
    };
    let b = apply_move(&d, &m).unwrap().diagram;
    // a kink on the loop arc at crossing 1 separates its two visits
    let [p, q] = b.visits(CrossingId(1)).unwrap();
    let k = if q == p + 1 { p } else { q };
    let arc = b.arcs()[k];
    let kinked = apply_move(&b, &ReidemeisterMove::R1Plus { arc, side: Side::Left, new_crossing: CrossingId(3) })
        .unwrap()
        .diagram;
    let err = apply_move(&kinked, &ReidemeisterMove::R1Minus { crossing: CrossingId(1) }).unwrap_err();
    assert!(matches!(err, MoveError::FacePreconditionFailed(_)));
}

#[test]
fn collisions_and_missing_operands_are_reported() {
    let d = CurveDiagram::from_json(&kink()).unwrap();
    let clash = ReidemeisterMove::R1Plus { arc: d.arcs()[0], side: Side::Left, new_crossing: CrossingId(1) };
    assert_eq!(apply_move(&d, &clash).unwrap_err(), MoveError::IdentifierCollision(CrossingId(1)));
    let missing = ReidemeisterMove::R1Minus { crossing: CrossingId(44) };
    assert!(matches!(apply_move(&d, &missing).unwrap_err(), MoveError::OperandMissing(_)));
}

#[test]
fn kink_r1_minus_gives_circle() {
    let d = CurveDiagram::from_json(&kink()).unwrap();
    let o = apply_move(&d, &ReidemeisterMove::R1Minus { crossing: CrossingId(1) }).unwrap();
    assert!(o.diagram.is_free_loop());
    assert_eq!(o.record.destroyed, vec![CrossingId(1)]);
    assert_eq!(o.diagram.euler_counts(), (1, 1, 2));
}

#[test]
fn move_json_uses_type_tags() {
    let m: ReidemeisterMove =
        serde_json::from_str(r#"{"type":"R2+","arcs":[1,2],"orientation":"parallel","new_crossings":[5,6]}"#)
            .unwrap();
    assert!(matches!(m, ReidemeisterMove::R2Plus { side: None, .. }));
    let back = serde_json::to_string(&m).unwrap();
    assert!(back.contains(r#""type":"R2+""#));
    assert!(!back.contains("side"));
    assert!(serde_json::from_str::<ReidemeisterMove>(r#"{"type":"R1-","crossing":1,"extra":0}"#).is_err());
}

#[test]
fn parse_rejects_concurrent_and_unknown_moves() {
    let base = r#"{"crossings":[],"arcs":[{"id":0,"ends":[0,1]}],"basepoint":0}"#;
    let concurrent = format!(r#"{{"initial":{base},"moves":[[{{"type":"R1-","crossing":1}}]]}}"#);
    assert_eq!(parse_script(&concurrent).unwrap_err(), ScriptError::ConcurrentEvents { index: 0 });
    let unknown = format!(r#"{{"initial":{base},"moves":[{{"type":"R4"}}]}}"#);
    assert!(matches!(parse_script(&unknown).unwrap_err(), ScriptError::UnknownMoveVariant { .. }));
    let bad = format!(r#"{{"initial":{base},"moves":[{{"type":"R1-","crossing":"x"}}]}}"#);
    match parse_script(&bad).unwrap_err() {
        ScriptError::Schema { path, .. } => assert!(path.starts_with("moves[0]"), "{path}"),
        other => panic!("{other:?}"),
    }
    let minimal = format!(r#"{{"initial":{base},"moves":[]}}"#);
    let s = parse_script(&minimal).unwrap();
    assert_eq!(elaborate_script(&s).unwrap().levels.len(), 1);
}

#[test]
fn dangling_reference_names_the_level() {
    let text = r#"{"initial":{"crossings":[],"arcs":[{"id":0,"ends":[0,1]}],"basepoint":0},
        "moves":[{"type":"R1+","arc":0,"side":"left","new_crossing":1},
                 {"type":"R1+","arc":77,"side":"left","new_crossing":2}]}"#;
    let s = parse_script(text).unwrap();
    assert!(matches!(elaborate_script(&s).unwrap_err(), ScriptError::DanglingReference { level: 1, .. }));
}

#[test]
fn reused_crossing_ids_collide_across_levels() {
    let text = r#"{"initial":{"crossings":[],"arcs":[{"id":0,"ends":[0,1]}],"basepoint":0},
        "moves":[{"type":"R1+","arc":0,"side":"left","new_crossing":1},
                 {"type":"R1-","crossing":1},
                 {"type":"R1+","arc":0,"side":"left","new_crossing":1}],"terminal":"point"}"#;
    let s = parse_script(text).unwrap();
    assert_eq!(
        elaborate_script(&s).unwrap_err(),
        ScriptError::IdentifierCollision { level: 2, id: CrossingId(1) }
    );
}

#[test]
fn point_terminal_requires_empty_last_level() {
    let text = r#"{"initial":{"crossings":[],"arcs":[{"id":0,"ends":[0,1]}],"basepoint":0},
        "moves":[{"type":"R1+","arc":0,"side":"right","new_crossing":1}],"terminal":"point"}"#;
    let s = parse_script(text).unwrap();
    assert_eq!(elaborate_script(&s).unwrap_err(), ScriptError::TerminalMismatch { crossings: 1 });
}

#[test]
fn script_round_trips() {
    let d = CurveDiagram::from_json(&circle()).unwrap();
    let s = HomotopyScript::new(
        &d,
        vec![ReidemeisterMove::R1Plus { arc: ArcId(0), side: Side::Left, new_crossing: CrossingId(1) }],
        Terminal::Curve,
    );
    let back = parse_script(&s.to_json_string()).unwrap();
    assert_eq!(back, s);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_candidate_move_applies(choices in prop::collection::vec(any::<u16>(), 1..10)) {
        let levels = random_walk(&choices, 7);
        for d in &levels {
            prop_assert_eq!(d.euler_characteristic(), 2);
        }
    }

    #[test]
    fn inverse_moves_restore_isomorphic_diagrams(
        choices in prop::collection::vec(any::<u16>(), 0..7),
        pick in any::<u16>(),
    ) {
        let d = random_walk(&choices, 6).pop().unwrap();
        let fresh = next_id(&d);
        let cands = candidate_moves(&d, fresh);
        let m = &cands[pick as usize % cands.len()];
        let up = apply_move(&d, m).unwrap();
        let inverse = match m {
            ReidemeisterMove::R1Plus { new_crossing, .. } => {
                prop_assert_eq!(up.diagram.faces().faces.len(), d.faces().faces.len() + 1);
                prop_assert!(has_monogon_at(&up.diagram, *new_crossing));
                Some(ReidemeisterMove::R1Minus { crossing: *new_crossing })
            }
            ReidemeisterMove::R2Plus { new_crossings, .. } => {
                prop_assert!(bigon_arcs(&up.diagram, new_crossings[0], new_crossings[1]).is_some());
                Some(ReidemeisterMove::R2Minus { crossings: *new_crossings })
            }
            ReidemeisterMove::R3 { .. } => {
                prop_assert_eq!(up.diagram.faces().faces.len(), d.faces().faces.len());
                prop_assert_eq!(up.record.correspondence.len(), d.crossing_count());
                Some(m.clone())
            }
            _ => None,
        };
        if let Some(inv) = inverse {
            let back = apply_move(&up.diagram, &inv).unwrap();
            prop_assert!(back.diagram.is_isomorphic(&d));
        }
        let delta = up.diagram.crossing_count() as i64 - d.crossing_count() as i64;
        prop_assert_eq!(delta, m.crossing_delta());
    }
}
