//! Seeded random instances for property tests and acceptance runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::CurveDiagram;
use crate::moves::{apply_move, candidate_moves, HomotopyScript, ReidemeisterMove, Terminal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn next_fresh(d: &CurveDiagram) -> u32 {
    d.crossing_ids().last().map_or(1, |c| c.0 + 1)
}

/// Random moves from `start`, each picked uniformly among the applicable
/// ones that keep at most `max_crossings` crossings.
pub fn random_moves(
    rng: &mut impl Rng,
    start: &CurveDiagram,
    moves: usize,
    max_crossings: usize,
) -> (Vec<ReidemeisterMove>, CurveDiagram) {
    let mut d = start.clone();
    let mut fresh = next_fresh(&d);
    let mut out = Vec::new();
    for _ in 0..moves {
        let cands: Vec<_> = candidate_moves(&d, fresh)
            .into_iter()
            .filter(|m| d.crossing_count() as i64 + m.crossing_delta() <= max_crossings as i64)
            .collect();
        let Some(m) = cands.choose(rng) else { break };
        d = apply_move(&d, m).expect("candidate moves apply").diagram;
        fresh += 2;
        out.push(m.clone());
    }
    (out, d)
}

/// A script from the plane circle with up to `max_moves` moves.
pub fn random_script(rng: &mut impl Rng, max_moves: usize, max_crossings: usize) -> HomotopyScript {
    let n = rng.gen_range(1..=max_moves);
    let start = CurveDiagram::circle();
    let (moves, _) = random_moves(rng, &start, n, max_crossings);
    HomotopyScript::new(&start, moves, Terminal::Curve)
}

/// A random curve with at most `max_crossings` crossings.
pub fn random_diagram(rng: &mut impl Rng, max_crossings: usize) -> CurveDiagram {
    let n = rng.gen_range(0..=2 * max_crossings + 2);
    random_moves(rng, &CurveDiagram::circle(), n, max_crossings).1
}

/// A random curve with exactly `k` crossings.
pub fn random_diagram_exact(rng: &mut impl Rng, k: usize) -> CurveDiagram {
    loop {
        let mut d = CurveDiagram::circle();
        let mut fresh = 1;
        for _ in 0..(4 * k + 8) {
            let cands: Vec<_> = candidate_moves(&d, fresh)
                .into_iter()
                .filter(|m| d.crossing_count() as i64 + m.crossing_delta() <= k as i64)
                .collect();
            let Some(m) = cands.choose(rng) else { break };
            d = apply_move(&d, m).unwrap().diagram;
            fresh += 2;
            if d.crossing_count() == k && rng.gen_bool(0.5) {
                return d;
            }
        }
        if d.crossing_count() == k {
            return d;
        }
    }
}

/// Search for moves taking `d` to the crossing-free circle: removals when
/// available, otherwise triangle moves and occasional insertions, restarted
/// a few times. Returns `None` if the budget runs out.
pub fn find_contraction(
    rng: &mut impl Rng,
    d: &CurveDiagram,
    step_budget: usize,
    restarts: usize,
) -> Option<Vec<ReidemeisterMove>> {
    let fresh0 = next_fresh(d);
    for _ in 0..restarts {
        let mut cur = d.clone();
        let mut fresh = fresh0;
        let mut out = Vec::new();
        while cur.crossing_count() > 0 && out.len() < step_budget {
            let cands = candidate_moves(&cur, fresh);
            let removals: Vec<_> = cands.iter().filter(|m| m.crossing_delta() < 0).collect();
            let flips: Vec<_> = cands.iter().filter(|m| m.crossing_delta() == 0).collect();
            let inserts: Vec<_> = cands.iter().filter(|m| m.crossing_delta() > 0).collect();
            let pool = if !removals.is_empty() && rng.gen_bool(0.9) {
                removals
            } else if !flips.is_empty() && rng.gen_bool(0.8) {
                flips
            } else if !inserts.is_empty() {
                inserts
            } else {
                cands.iter().collect()
            };
            let m = (*pool.choose(rng)?).clone();
            cur = apply_move(&cur, &m).unwrap().diagram;
            fresh += 2;
            out.push(m);
        }
        if cur.crossing_count() == 0 {
            return Some(out);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::elaborate_script;

    #[test]
    fn exact_crossing_counts() {
        let mut r = rng(3);
        for k in 0..5 {
            for _ in 0..10 {
                assert_eq!(random_diagram_exact(&mut r, k).crossing_count(), k);
            }
        }
    }

    #[test]
    fn random_scripts_elaborate() {
        let mut r = rng(11);
        for _ in 0..50 {
            let s = random_script(&mut r, 8, 6);
            let e = elaborate_script(&s).unwrap();
            assert!(e.crossing_counts().iter().all(|&c| c <= 6));
        }
    }

    #[test]
    fn contractions_reach_the_circle() {
        let mut r = rng(5);
        for _ in 0..20 {
            let d = random_diagram(&mut r, 6);
            let moves = find_contraction(&mut r, &d, 200, 20).expect("contraction found");
            let s = HomotopyScript::new(&d, moves, Terminal::Point);
            elaborate_script(&s).unwrap();
        }
    }
}
