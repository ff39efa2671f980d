use std::collections::BTreeMap;
use std::path::PathBuf;

use curve_homotopy::diagram::{validate_diagram, DiagramJson};
use curve_homotopy::gamma::{build_gamma, check_parity, find_isotopy_path, verify_trace, EdgeLabel};
use curve_homotopy::moves::{elaborate_script, parse_script, ElaboratedScript};
use curve_homotopy::oracle::{brute_components, path_exists, rotation_face_count, rotation_system};
use curve_homotopy::smoothing::{enumerate_admissible, DEFAULT_CAP};
use curve_homotopy::{CurveDiagram, Sign};

fn read(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn diagram(name: &str) -> (DiagramJson, CurveDiagram) {
    let json: DiagramJson = serde_json::from_str(&read(name)).unwrap();
    let d = CurveDiagram::from_json(&json).unwrap();
    (json, d)
}

fn script(name: &str) -> ElaboratedScript {
    elaborate_script(&parse_script(&read(name)).unwrap()).unwrap()
}

#[test]
fn shipped_diagrams_have_expected_cell_counts() {
    for (name, crossings, faces) in [("circle.json", 0, 2), ("kink.json", 1, 3), ("bigon.json", 2, 4)] {
        let (json, d) = diagram(name);
        assert!(validate_diagram(&json).violations.is_empty(), "{name}");
        assert_eq!(d.crossing_count(), crossings, "{name}");
        let (rot, mate) = rotation_system(&json, 0);
        assert_eq!(rotation_face_count(&rot, &mate), faces, "{name}");
        assert_eq!(d.euler_characteristic(), 2, "{name}");
        for c in d.crossing_ids() {
            assert_eq!(d.passages().iter().filter(|p| p.crossing == c).count(), 2);
        }
    }
    assert_eq!(diagram("bigon.json").1.arcs().len(), 4);
}

#[test]
fn bigon_sign_pairs_give_one_two_two_three_components() {
    let (_, d) = diagram("bigon.json");
    let ids = d.crossing_ids();
    let mut counts = Vec::new();
    for a in [Sign::Positive, Sign::Negative] {
        for b in [Sign::Positive, Sign::Negative] {
            let signs: BTreeMap<_, _> = [(ids[0], a), (ids[1], b)].into_iter().collect();
            counts.push(brute_components(&d, &signs));
        }
    }
    counts.sort();
    assert_eq!(counts, vec![1, 2, 2, 3]);
}

#[test]
fn example_two_levels_and_graph() {
    let s = script("ex2.json");
    assert_eq!(s.crossing_counts(), vec![0, 2, 4, 4, 2]);
    let sizes: Vec<usize> = s.levels.iter().map(|d| enumerate_admissible(d, DEFAULT_CAP).unwrap().len()).collect();
    assert_eq!(sizes[2..4], [5, 3]);
    let g = build_gamma(&s, DEFAULT_CAP).unwrap();
    assert!(check_parity(&g).passed());
    // only the first and last curves may have odd degree
    for v in 0..g.vertices.len() {
        let level = g.vertices[v].level;
        if level != 0 && level != 4 {
            assert_eq!(g.degree(v) % 2, 0);
        }
    }
    let trace = find_isotopy_path(&s, &g).unwrap();
    assert!(verify_trace(&s, &trace).is_empty());
    assert_eq!(trace.vertices().last().unwrap().0, 4);
}

#[test]
fn example_one_cannot_avoid_the_horizontal_move() {
    let s = script("example1.json");
    assert_eq!(s.crossing_counts(), vec![0, 2, 4, 2, 0]);
    let g = build_gamma(&s, DEFAULT_CAP).unwrap();
    let last = g.level_count - 1;
    for v in 0..g.vertices.len() {
        let level = g.vertices[v].level;
        if level != 0 && level != last {
            assert!([2, 4].contains(&g.degree(v)), "degree {}", g.degree(v));
        }
    }
    let trace = find_isotopy_path(&s, &g).unwrap();
    assert!(verify_trace(&s, &trace).is_empty());
    assert_eq!(trace.count(EdgeLabel::M2b), 2);

    let mut og = g.to_oracle_graph();
    og.edges.retain(|e| e.2 != "M2b");
    assert!(!path_exists(&og, g.start().unwrap(), &g.targets()));
}
