//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use curve_homotopy::corpus::{find_contraction, random_diagram, random_diagram_exact, random_script, rng};
use curve_homotopy::gamma::{build_gamma, find_isotopy_path, verify_trace, EdgeLabel, ResolutionGraph};
use curve_homotopy::geometry::{schoenflies_demo, DemoOptions, KeyframesJson, PolylineFrame, LENGTH_TOLERANCE};
use curve_homotopy::halving::{build_tracking_graph, extract_subcurves, perturb_double, verify_selection, walk_halving_path};
use curve_homotopy::moves::{apply_move, candidate_moves, elaborate_script, parse_script, ElaboratedScript, HomotopyScript, ReidemeisterMove, Terminal};
use curve_homotopy::oracle::{brute_admissible, brute_components, brute_paths, brute_r3_local, path_exists};
use curve_homotopy::smoothing::{component_count, enumerate_admissible, Resolution, Sign, DEFAULT_CAP};
use curve_homotopy::{CrossingId, CurveDiagram};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn elaborate_fixture(name: &str) -> ElaboratedScript {
    elaborate_script(&parse_script(&fixture(name)).unwrap()).unwrap()
}

/// The seeded script corpus shared by the parity and path criteria.
fn script_corpus() -> Vec<ElaboratedScript> {
    let mut r = rng(2024);
    (0..200).map(|_| elaborate_script(&random_script(&mut r, 8, 6)).unwrap()).collect()
}

fn diagram_corpus() -> Vec<CurveDiagram> {
    let mut r = rng(77);
    (0..500).map(|_| random_diagram(&mut r, 10)).collect()
}

fn degree(g: &ResolutionGraph, v: usize) -> u32 {
    g.edges.iter().filter(|e| e.lower == v || e.upper == v).map(|e| e.multiplicity * if e.lower == e.upper { 2 } else { 1 }).sum()
}

fn ex2_counts() -> Result<String, String> {
    let s = elaborate_fixture("ex2.json");
    let a2 = enumerate_admissible(&s.levels[2], DEFAULT_CAP).map_err(|e| e.to_string())?.len();
    let a3 = enumerate_admissible(&s.levels[3], DEFAULT_CAP).map_err(|e| e.to_string())?.len();
    let detail = format!("admissible at levels 2, 3 = {a2}, {a3}");
    if (a2, a3) == (5, 3) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn parity(corpus: &[ElaboratedScript]) -> Result<String, String> {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (i, s) in corpus.iter().enumerate() {
        let g = build_gamma(s, DEFAULT_CAP).map_err(|e| format!("script {i}: {e}"))?;
        let last = g.level_count - 1;
        for (v, vx) in g.vertices.iter().enumerate() {
            if vx.level == 0 || vx.level == last {
                continue;
            }
            checked += 1;
            let d = degree(&g, v);
            if ![2, 4, 6].contains(&d) {
                bad.push((i, vx.level, d));
            }
        }
    }
    let detail = format!("{checked} interior vertices, {} violations", bad.len());
    if bad.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}: first {:?}", &bad[..bad.len().min(5)]))
    }
}

fn paths(corpus: &[ElaboratedScript]) -> Result<String, String> {
    let mut brute_checked = 0;
    for (i, s) in corpus.iter().enumerate() {
        if s.levels[0].crossing_count() != 0 {
            continue;
        }
        let g = build_gamma(s, DEFAULT_CAP).map_err(|e| format!("script {i}: {e}"))?;
        let trace = find_isotopy_path(s, &g).map_err(|e| format!("script {i}: {e}"))?;
        let violations = verify_trace(s, &trace);
        if !violations.is_empty() {
            return Err(format!("script {i}: trace rejected: {violations:?}"));
        }
        let og = g.to_oracle_graph();
        let start = g.start().unwrap();
        if !path_exists(&og, start, &g.targets()) {
            return Err(format!("script {i}: oracle finds no path"));
        }
        if trace.steps.len() <= 32 {
            let found = brute_paths(&og, start, &g.targets(), trace.steps.len(), 1).map_err(|e| e.to_string())?;
            if found.is_empty() {
                return Err(format!("script {i}: brute enumeration finds no path of length {}", trace.steps.len()));
            }
            if let Ok(shorter) = brute_paths(&og, start, &g.targets(), trace.steps.len().saturating_sub(1), 1) {
                if trace.steps.len() > 0 && !shorter.is_empty() {
                    return Err(format!("script {i}: a shorter path exists"));
                }
            }
            brute_checked += 1;
        }
    }
    Ok(format!("{} scripts traced and verified, {brute_checked} cross-checked by enumeration", corpus.len()))
}

fn example_one() -> Result<String, String> {
    let s = elaborate_fixture("example1.json");
    let counts = s.crossing_counts();
    if counts != vec![0, 2, 4, 2, 0] {
        return Err(format!("crossing counts {counts:?}"));
    }
    let g = build_gamma(&s, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let trace = find_isotopy_path(&s, &g).map_err(|e| e.to_string())?;
    let violations = verify_trace(&s, &trace);
    if !violations.is_empty() {
        return Err(format!("trace rejected: {violations:?}"));
    }
    let og = g.to_oracle_graph();
    let all = brute_paths(&og, g.start().unwrap(), &g.targets(), 16, 10_000).map_err(|e| e.to_string())?;
    let m2b: Vec<usize> = all.iter().map(|p| p.iter().filter(|&&e| og.edges[e].2 == "M2b").count()).collect();
    let detail = format!(
        "trace of {} steps ({} M2b); {} enumerated paths with M2b counts {m2b:?}",
        trace.steps.len(),
        trace.count(EdgeLabel::M2b),
        all.len()
    );
    if m2b.contains(&2) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn doubling() -> Result<String, String> {
    let mut r = rng(5);
    for k in 0..=3 {
        for _ in 0..50 {
            let alpha = random_diagram_exact(&mut r, k);
            let dc = perturb_double(&alpha).map_err(|e| e.to_string())?;
            if dc.beta.crossing_count() != 4 * k + 1 {
                return Err(format!("k = {k}: beta has {} crossings", dc.beta.crossing_count()));
            }
        }
    }
    Ok("200 doublings, all 4k+1".into())
}

fn halving() -> Result<String, String> {
    let mut r = rng(11);
    let mut done = 0;
    let mut attempts = 0;
    while done < 200 {
        attempts += 1;
        if attempts > 400 {
            return Err(format!("only {done} contractions found in {attempts} attempts"));
        }
        let k = done % 3;
        let dc = perturb_double(&random_diagram_exact(&mut r, k)).map_err(|e| e.to_string())?;
        let Some(moves) = find_contraction(&mut r, &dc.beta, 400, 50) else { continue };
        let s = elaborate_script(&HomotopyScript::new(&dc.beta, moves, Terminal::Point)).map_err(|e| e.to_string())?;
        let dc = dc.rebase(&s.levels[0]).map_err(|e| e.to_string())?;
        let g = build_tracking_graph(&s, &dc).map_err(|e| format!("contraction {done}: {e}"))?;
        for v in 0..g.vertices.len() {
            if !g.terminal.contains(&v) && g.degree(v) != 2 {
                return Err(format!("contraction {done}: vertex {:?} has degree {}", g.vertices[v], g.degree(v)));
            }
        }
        let path = walk_halving_path(&g).map_err(|e| format!("contraction {done}: {e}"))?;
        let end = path.last().map(|p| p.vertex).unwrap_or(g.start);
        if !g.terminal.contains(&end) || end == g.start {
            return Err(format!("contraction {done}: walk ends outside the terminal set"));
        }
        let sel = extract_subcurves(&s, &g, &path, &dc).map_err(|e| format!("contraction {done}: {e}"))?;
        let violations = verify_selection(&s, &dc, &sel);
        if !violations.is_empty() {
            return Err(format!("contraction {done}: {violations:?}"));
        }
        done += 1;
    }
    Ok(format!("{done} contractions halved ({attempts} attempts)"))
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    robust::orient2d(robust::Coord { x: a[0], y: a[1] }, robust::Coord { x: b[0], y: b[1] }, robust::Coord { x: c[0], y: c[1] })
}

/// Pairs of non-adjacent segments that meet, touching included, by exact
/// orientation tests.
fn self_intersections(f: &PolylineFrame) -> usize {
    let n = f.points.len();
    let on = |a: [f64; 2], b: [f64; 2], p: [f64; 2]| {
        p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
    };
    let mut count = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let ((a, b), (c, d)) = (f.segment(i), f.segment(j));
            let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
            let proper = o1 * o2 < 0.0 && o3 * o4 < 0.0;
            let touch = (o1 == 0.0 && on(a, b, c))
                || (o2 == 0.0 && on(a, b, d))
                || (o3 == 0.0 && on(c, d, a))
                || (o4 == 0.0 && on(c, d, b));
            if proper || touch {
                count += 1;
            }
        }
    }
    count
}

fn length_bound() -> Result<String, String> {
    let k: KeyframesJson = serde_json::from_str(&fixture("spiral12.json")).map_err(|e| e.to_string())?;
    let polygon = k.frames[0].clone();
    let epsilon = 1e-2;
    let out = schoenflies_demo(&polygon, &DemoOptions { epsilon, ..DemoOptions::default() }).map_err(|e| e.to_string())?;
    let max = out.detection.frames.iter().map(PolylineFrame::length).fold(0.0, f64::max);
    let mut worst = f64::NEG_INFINITY;
    for (i, step) in out.steps.iter().enumerate() {
        let f = &step.realized.frame;
        worst = worst.max(f.length() - max);
        if f.length() > max + epsilon + LENGTH_TOLERANCE {
            return Err(format!("step {i}: length {} exceeds {max} + {epsilon}", f.length()));
        }
        let x = self_intersections(f);
        if x != 0 {
            return Err(format!("step {i}: {x} self-intersections"));
        }
    }
    let moves = out.detection.script.moves.len();
    if moves == 0 {
        return Err("interpolation produced no moves".into());
    }
    Ok(format!("{moves} moves, {} steps, max excess over longest frame {worst:.3e}", out.steps.len()))
}

fn oracle_equivalence(corpus: &[CurveDiagram]) -> Result<String, String> {
    let mut assignments = 0u64;
    for (i, d) in corpus.iter().enumerate() {
        let engine: BTreeSet<Resolution> = enumerate_admissible(d, DEFAULT_CAP).map_err(|e| e.to_string())?.into_iter().collect();
        let brute: BTreeSet<Resolution> = brute_admissible(d).into_iter().map(Resolution::from_signs).collect();
        if engine != brute {
            return Err(format!("diagram {i}: {} admissible by engine, {} by oracle", engine.len(), brute.len()));
        }
        let ids = d.crossing_ids();
        for mask in 0u32..(1 << ids.len()) {
            let signs: BTreeMap<CrossingId, Sign> = ids
                .iter()
                .enumerate()
                .map(|(b, c)| (*c, if mask >> b & 1 == 1 { Sign::Negative } else { Sign::Positive }))
                .collect();
            let r = Resolution::from_signs(signs.clone());
            if component_count(d, &r) != brute_components(d, &signs) {
                return Err(format!("diagram {i}: component counts differ under {r:?}"));
            }
            assignments += 1;
        }
    }
    Ok(format!("{} diagrams, {assignments} sign assignments", corpus.len()))
}

fn r3_tables(scripts: &[ElaboratedScript], diagrams: &[CurveDiagram]) -> Result<String, String> {
    let mut contexts = 0;
    let levels = scripts.iter().flat_map(|s| s.levels.iter());
    let fixtures = [elaborate_fixture("ex2.json"), elaborate_fixture("example1.json")];
    let fixture_levels = fixtures.iter().flat_map(|s| s.levels.iter());
    for d in levels.chain(diagrams).chain(fixture_levels) {
        let fresh = d.crossing_ids().last().map_or(1, |c| c.0 + 1);
        for m in candidate_moves(d, fresh) {
            if let ReidemeisterMove::R3 { crossings, face } = m {
                let after = apply_move(d, &m).map_err(|e| e.to_string())?.diagram;
                let t = brute_r3_local(d, &after, crossings, face);
                if t.before_only() != 1 || t.after_only() != 1 || !t.fans().contains(&3) {
                    return Err(format!(
                        "triangle {crossings:?}: before-only {}, after-only {}, fans {:?}",
                        t.before_only(),
                        t.after_only(),
                        t.fans()
                    ));
                }
                contexts += 1;
            }
        }
    }
    if contexts == 0 {
        return Err("no triangle contexts in the corpora".into());
    }
    Ok(format!("{contexts} triangle contexts"))
}

fn main() {
    let scripts = script_corpus();
    let diagrams = diagram_corpus();
    type Check<'a> = Box<dyn Fn() -> Result<String, String> + 'a>;
    let criteria: Vec<(&str, u64, Check)> = vec![
        ("example-2 resolution counts", 1, Box::new(ex2_counts)),
        ("gamma parity", 60, Box::new(|| parity(&scripts))),
        ("path existence", 120, Box::new(|| paths(&scripts))),
        ("example-1 replay", 5, Box::new(example_one)),
        ("doubling count", 10, Box::new(doubling)),
        ("halving termination", 120, Box::new(halving)),
        ("length bound", 30, Box::new(length_bound)),
        ("oracle equivalence", 120, Box::new(|| oracle_equivalence(&diagrams))),
        ("triangle tables", 30, Box::new(|| r3_tables(&scripts, &diagrams))),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let elapsed = t.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (ok, detail) = match result {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {} {name}: {detail} ({:.2}s, limit {limit}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
