use proptest::prelude::*;

use super::*;
use crate::diagram::{ArcId, CurveDiagram, Side};
use crate::moves::{
    apply_move, candidate_moves, elaborate_script, HomotopyScript, RelativeOrientation, Terminal,
};
use crate::oracle::{brute_components, brute_paths, path_exists};

fn finger() -> ReidemeisterMove {
    ReidemeisterMove::R2Plus {
        arcs: [ArcId(0), ArcId(0)],
        orientation: RelativeOrientation::Antiparallel,
        side: None,
        new_crossings: [CrossingId(1), CrossingId(2)],
    }
}

fn bigon() -> CurveDiagram {
    apply_move(&CurveDiagram::circle(), &finger()).unwrap().diagram
}

fn elaborate(moves: Vec<ReidemeisterMove>) -> ElaboratedScript {
    let script = HomotopyScript::new(&CurveDiagram::circle(), moves, Terminal::Curve);
    elaborate_script(&script).unwrap()
}

/// Pick moves from the candidate list by index, keeping crossings bounded.
fn random_moves(choices: &[u16], max_crossings: usize) -> Vec<ReidemeisterMove> {
    let mut d = CurveDiagram::circle();
    let mut fresh = 1;
    let mut out = Vec::new();
    for &pick in choices {
        let cands: Vec<_> = candidate_moves(&d, fresh)
            .into_iter()
            .filter(|m| d.crossing_count() as i64 + m.crossing_delta() <= max_crossings as i64)
            .collect();
        let m = cands[pick as usize % cands.len()].clone();
        d = apply_move(&d, &m).unwrap().diagram;
        fresh += 2;
        out.push(m);
    }
    out
}

#[test]
fn finger_bigon_classes_match_component_counts() {
    use Sign::{Negative as N, Positive as P};
    let d = bigon();
    let expected = [
        (P, P, BigonClass::Mixed, 3),
        (P, N, BigonClass::Trapped, 2),
        (N, P, BigonClass::Trapped, 2),
        (N, N, BigonClass::Separable, 1),
    ];
    for (a, b, class, components) in expected {
        let r = Resolution::from_signs([(CrossingId(1), a), (CrossingId(2), b)]);
        assert_eq!(classify_bigon(&d, CrossingId(1), CrossingId(2), &r).unwrap(), class, "{r}");
        assert_eq!(component_count(&d, &r), components, "{r}");
        let signs = [(CrossingId(1), a), (CrossingId(2), b)].into_iter().collect();
        assert_eq!(brute_components(&d, &signs), components, "{r}");
    }
}

#[test]
fn classify_rejects_non_bigon() {
    let d = bigon();
    let r = Resolution::from_signs([(CrossingId(1), Sign::Positive)]);
    assert_eq!(
        classify_bigon(&d, CrossingId(1), CrossingId(2), &r),
        Err(GammaError::UnassignedCrossing)
    );
    let kinked = apply_move(
        &CurveDiagram::circle(),
        &ReidemeisterMove::R1Plus { arc: ArcId(0), side: Side::Left, new_crossing: CrossingId(1) },
    )
    .unwrap()
    .diagram;
    let r = Resolution::from_signs([(CrossingId(1), Sign::Positive)]);
    assert!(matches!(
        classify_bigon(&kinked, CrossingId(1), CrossingId(9), &r),
        Err(GammaError::NotABigon(..))
    ));
}

#[test]
fn empty_script_is_a_single_vertex() {
    let s = elaborate(vec![]);
    let g = build_gamma(&s, 20).unwrap();
    assert_eq!(g.vertices.len(), 1);
    assert!(g.edges.is_empty());
    let t = find_isotopy_path(&s, &g).unwrap();
    assert!(t.steps.is_empty());
    assert_eq!(t.final_orientation, Orientation::Same);
    assert!(verify_trace(&s, &t).is_empty());
}

#[test]
fn finger_and_back_uses_separable_edges() {
    let s = elaborate(vec![
        finger(),
        ReidemeisterMove::R2Minus { crossings: [CrossingId(1), CrossingId(2)] },
    ]);
    let g = build_gamma(&s, 20).unwrap();
    // only the separable smoothing of a bare finger is connected
    assert_eq!(g.vertices_at(1).len(), 1);
    let counts = |label| g.edges.iter().filter(|e| e.label == label).count();
    assert_eq!(counts(EdgeLabel::M2aPlus), 1);
    assert_eq!(counts(EdgeLabel::M2aMinus), 1);
    assert_eq!(counts(EdgeLabel::M2b), 0);
    assert!(check_parity(&g).passed());
    let t = find_isotopy_path(&s, &g).unwrap();
    assert_eq!(t.steps.len(), 2);
    assert!(verify_trace(&s, &t).is_empty());
}

#[test]
fn corrupted_trace_is_rejected() {
    let s = elaborate(vec![
        finger(),
        ReidemeisterMove::R2Minus { crossings: [CrossingId(1), CrossingId(2)] },
    ]);
    let g = build_gamma(&s, 20).unwrap();
    let mut t = find_isotopy_path(&s, &g).unwrap();
    let step = &mut t.steps[0];
    let flipped = step.resolution_to.get(CrossingId(1)).unwrap().flipped();
    step.resolution_to.set(CrossingId(1), flipped);
    let violations = verify_trace(&s, &t);
    assert!(
        violations.iter().any(|v| matches!(v, TraceViolation::IllegalStep { index: 0, .. })),
        "{violations:?}"
    );
}

#[test]
fn non_simple_initial_is_refused() {
    let start = bigon();
    let script = HomotopyScript::new(
        &start,
        vec![ReidemeisterMove::R2Minus { crossings: [CrossingId(1), CrossingId(2)] }],
        Terminal::Curve,
    );
    let s = elaborate_script(&script).unwrap();
    let g = build_gamma(&s, 20).unwrap();
    assert_eq!(find_isotopy_path(&s, &g), Err(GammaError::NonSimpleInitial(2)));
}

#[test]
fn kink_edges_use_the_connecting_sign() {
    let s = elaborate(vec![ReidemeisterMove::R1Plus {
        arc: ArcId(0),
        side: Side::Right,
        new_crossing: CrossingId(1),
    }]);
    let g = build_gamma(&s, 20).unwrap();
    assert_eq!(g.vertices_at(1).len(), 1);
    assert_eq!(g.edges.len(), 1);
    assert_eq!(g.edges[0].label, EdgeLabel::M1Plus);
    let t = find_isotopy_path(&s, &g).unwrap();
    assert!(verify_trace(&s, &t).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_scripts_have_even_degrees_and_a_verified_path(
        choices in prop::collection::vec(any::<u16>(), 1..7),
    ) {
        let s = elaborate(random_moves(&choices, 6));
        let g = build_gamma(&s, 20).unwrap();
        let parity = check_parity(&g);
        prop_assert!(parity.passed(), "{:?}", parity.offenders);

        let og = g.to_oracle_graph();
        let start = g.start().unwrap();
        let targets = g.targets();
        prop_assert!(path_exists(&og, start, &targets));
        let t = find_isotopy_path(&s, &g).unwrap();
        let violations = verify_trace(&s, &t);
        prop_assert!(violations.is_empty(), "{:?}", violations);

        // breadth-first search finds a shortest path
        if og.vertex_count <= 200 {
            let paths = brute_paths(&og, start, &targets, t.steps.len(), usize::MAX).unwrap();
            prop_assert!(!paths.is_empty());
            prop_assert!(paths.iter().all(|p| p.len() >= t.steps.len()));
        }
    }
}

