//! Engine against brute-force oracle, one JSON line per instance.

use std::collections::BTreeMap;
use std::path::Path;

use curve_homotopy::gamma::{build_gamma, find_isotopy_path, local_r3_matchings, GammaError, LocalMatching};
use curve_homotopy::moves::{apply_move, candidate_moves};
use curve_homotopy::oracle::{brute_admissible, brute_r3_local, path_exists, LocalClass, OracleReport};
use curve_homotopy::smoothing::enumerate_admissible;
use curve_homotopy::{ArcId, CrossingId, CurveDiagram, ReidemeisterMove, Sign};
use rayon::prelude::*;
use serde_json::json;

use crate::failure::Failure;
use crate::input;
use crate::Options;

type Table = BTreeMap<(Vec<((ArcId, u8), (ArcId, u8))>, usize), Vec<[Sign; 3]>>;

/// Print the reports in order; disagreement is an invariant failure.
fn emit(reports: Vec<OracleReport>) -> Result<(), Failure> {
    let mut bad = Vec::new();
    for r in &reports {
        println!("{}", serde_json::to_string(r).map_err(Failure::invariant)?);
        if !r.agree {
            bad.push(r.instance.clone());
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::invariant(format!("engine and oracle disagree on {}", bad.join(", "))))
    }
}

fn pool(opts: &Options) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().map_err(Failure::invariant)
}

fn select(levels: Vec<CurveDiagram>, level: Option<usize>) -> Result<Vec<(usize, CurveDiagram)>, Failure> {
    let n = levels.len();
    let all: Vec<(usize, CurveDiagram)> = levels.into_iter().enumerate().collect();
    match level {
        None => Ok(all),
        Some(l) if l < n => Ok(vec![all[l].clone()]),
        Some(l) => Err(Failure::input(format!("level {l} out of range (0..{n})"))),
    }
}

pub fn resolutions(path: &Path, level: Option<usize>, opts: &Options) -> Result<(), Failure> {
    let levels = select(input::levels(path)?, level)?;
    let reports: Result<Vec<_>, Failure> = pool(opts)?.install(|| {
        levels
            .par_iter()
            .map(|(l, d)| {
                let engine = enumerate_admissible(d, opts.cap)?;
                let mut engine: Vec<BTreeMap<CrossingId, Sign>> =
                    engine.iter().map(|r| r.iter().collect()).collect();
                let mut oracle = brute_admissible(d);
                engine.sort();
                oracle.sort();
                Ok(OracleReport {
                    instance: format!("level {l}"),
                    oracle: json!(oracle.len()),
                    engine: json!(engine.len()),
                    agree: engine == oracle,
                })
            })
            .collect()
    });
    emit(reports?)
}

pub fn paths(path: &Path, opts: &Options) -> Result<(), Failure> {
    let s = input::elaborated(path)?;
    let g = build_gamma(&s, opts.cap)?;
    let engine = match find_isotopy_path(&s, &g) {
        Ok(t) => json!({ "found": true, "length": t.steps.len() }),
        Err(GammaError::NoPathFound) => json!({ "found": false }),
        Err(e) => return Err(e.into()),
    };
    let start = g.start().ok_or_else(|| Failure::invariant("resolution graph has no start vertex"))?;
    let reachable = path_exists(&g.to_oracle_graph(), start, &g.targets());
    emit(vec![OracleReport {
        instance: path.display().to_string(),
        agree: engine["found"] == json!(reachable),
        oracle: json!({ "found": reachable }),
        engine,
    }])
}

fn summary(before: &Table, after: &Table) -> serde_json::Value {
    let before_only = before.keys().filter(|k| !after.contains_key(*k)).count();
    let after_only = after.keys().filter(|k| !before.contains_key(*k)).count();
    let fans: Vec<usize> = before
        .iter()
        .filter_map(|(k, b)| after.get(k).filter(|a| (a.len() == 1) != (b.len() == 1)).map(|a| a.len().max(b.len())))
        .collect();
    json!({ "before_only": before_only, "after_only": after_only, "fans": fans })
}

fn r3_reports(l: usize, d: &CurveDiagram) -> Result<Vec<OracleReport>, Failure> {
    let fresh = d.crossing_ids().last().map_or(1, |c| c.0 + 1);
    let mut out = Vec::new();
    for m in candidate_moves(d, fresh) {
        let ReidemeisterMove::R3 { crossings, face } = m else { continue };
        let after = apply_move(d, &m).map_err(Failure::invariant)?.diagram;
        let engine = local_r3_matchings(d, &after, crossings, face)?;
        let oracle = brute_r3_local(d, &after, crossings, face);
        let convert_engine = |t: BTreeMap<LocalMatching, Vec<[Sign; 3]>>| -> Table {
            t.into_iter().map(|(k, v)| ((k.pairs, k.circles), v)).collect()
        };
        let convert_oracle = |t: BTreeMap<LocalClass, Vec<[Sign; 3]>>| -> Table {
            t.into_iter().map(|(k, v)| ((k.pairs, k.circles), v)).collect()
        };
        let (eb, ea) = (convert_engine(engine.before), convert_engine(engine.after));
        let (ob, oa) = (convert_oracle(oracle.before), convert_oracle(oracle.after));
        out.push(OracleReport {
            instance: format!("level {l} triangle {}", crossings.map(|c| c.to_string()).join(" ")),
            oracle: summary(&ob, &oa),
            engine: summary(&eb, &ea),
            agree: eb == ob && ea == oa,
        });
    }
    Ok(out)
}

pub fn r3(path: &Path, level: Option<usize>, opts: &Options) -> Result<(), Failure> {
    let levels = select(input::levels(path)?, level)?;
    let reports: Result<Vec<Vec<OracleReport>>, Failure> =
        pool(opts)?.install(|| levels.par_iter().map(|(l, d)| r3_reports(*l, d)).collect());
    emit(reports?.into_iter().flatten().collect())
}
