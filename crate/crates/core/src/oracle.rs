//! Brute-force reference implementations.
//!
//! Nothing here calls the traversal, smoothing, or graph-search code it is
//! meant to check. Diagrams are read through their wire form only.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{ArcId, CrossingId, CurveDiagram, DiagramJson, HalfEdgeId};
use crate::smoothing::Sign;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search bound {bound} exceeds the limit of {limit}")]
    BoundExceeded { bound: usize, limit: usize },
    #[error("graph has {0} vertices, more than the oracle accepts")]
    GraphTooLarge(usize),
}

/// One engine-versus-oracle comparison, emitted as a JSON line.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub instance: String,
    pub oracle: serde_json::Value,
    pub engine: serde_json::Value,
    pub agree: bool,
}

/// Entry slots (first visit, second visit) of every crossing, found by
/// walking the wire-form diagram from its basepoint.
fn entry_slots(json: &DiagramJson) -> BTreeMap<CrossingId, (u8, u8)> {
    let mut slot: HashMap<HalfEdgeId, (CrossingId, u8)> = HashMap::new();
    for c in &json.crossings {
        for (i, h) in c.slots.iter().enumerate() {
            slot.insert(*h, (c.id, i as u8));
        }
    }
    let mut partner: HashMap<HalfEdgeId, HalfEdgeId> = HashMap::new();
    for a in &json.arcs {
        partner.insert(a.ends[0], a.ends[1]);
        partner.insert(a.ends[1], a.ends[0]);
    }
    let by_id: HashMap<CrossingId, &Vec<HalfEdgeId>> =
        json.crossings.iter().map(|c| (c.id, &c.slots)).collect();
    let mut entries: BTreeMap<CrossingId, Vec<u8>> = BTreeMap::new();
    let Some(&start) = slot.get(&json.basepoint) else { return BTreeMap::new() };
    let mut leaving = json.basepoint;
    // the basepoint leaves its crossing; that passage entered at the opposite slot
    entries.entry(start.0).or_default().push((start.1 + 2) % 4);
    loop {
        let arriving = partner[&leaving];
        let (c, s) = slot[&arriving];
        let out = by_id[&c][((s + 2) % 4) as usize];
        if out == json.basepoint {
            break;
        }
        entries.entry(c).or_default().push(s);
        leaving = out;
    }
    entries.into_iter().map(|(c, v)| (c, (v[0], v[1]))).collect()
}

fn sign_pairs(first: u8, second: u8, sign: Sign) -> [(u8, u8); 2] {
    match sign {
        Sign::Positive => [(first, (second + 2) % 4), ((first + 2) % 4, second)],
        Sign::Negative => [(first, second), ((first + 2) % 4, (second + 2) % 4)],
    }
}

/// Component count of the smoothing, by union-find over half-edges.
pub fn brute_components(d: &CurveDiagram, signs: &BTreeMap<CrossingId, Sign>) -> usize {
    let json = d.to_json();
    if json.crossings.is_empty() {
        return json.arcs.len();
    }
    let mut index: HashMap<HalfEdgeId, usize> = HashMap::new();
    for c in &json.crossings {
        for h in &c.slots {
            let n = index.len();
            index.insert(*h, n);
        }
    }
    let mut uf = UnionFind::<usize>::new(index.len());
    for a in &json.arcs {
        uf.union(index[&a.ends[0]], index[&a.ends[1]]);
    }
    let entries = entry_slots(&json);
    for c in &json.crossings {
        let (first, second) = entries[&c.id];
        let pairs = match signs.get(&c.id) {
            Some(s) => sign_pairs(first, second, *s),
            None => [(0, 2), (1, 3)],
        };
        for (x, y) in pairs {
            uf.union(index[&c.slots[x as usize]], index[&c.slots[y as usize]]);
        }
    }
    let roots: BTreeSet<usize> = (0..index.len()).map(|i| uf.find(i)).collect();
    roots.len()
}

/// Every total sign vector (over sorted crossing ids) with one component.
pub fn brute_admissible(d: &CurveDiagram) -> Vec<BTreeMap<CrossingId, Sign>> {
    let ids: Vec<CrossingId> = d.to_json().crossings.iter().map(|c| c.id).collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << ids.len()) {
        let signs: BTreeMap<CrossingId, Sign> = ids
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let negative = mask & (1 << (ids.len() - 1 - i)) != 0;
                (*c, if negative { Sign::Negative } else { Sign::Positive })
            })
            .collect();
        if brute_components(d, &signs) == 1 {
            out.push(signs);
        }
    }
    out
}

/// Faces of an arbitrary rotation system: `rotation[v]` lists darts
/// counterclockwise around vertex `v`, `mate` pairs the darts of each edge.
pub fn rotation_face_count(rotation: &[Vec<usize>], mate: &[usize]) -> usize {
    let mut next_ccw = vec![usize::MAX; mate.len()];
    for darts in rotation {
        for (i, &dart) in darts.iter().enumerate() {
            next_ccw[dart] = darts[(i + 1) % darts.len()];
        }
    }
    let mut seen = vec![false; mate.len()];
    let mut faces = 0;
    for start in 0..mate.len() {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut dart = start;
        while !seen[dart] {
            seen[dart] = true;
            dart = next_ccw[mate[dart]];
        }
    }
    faces
}

/// Rotation system of a diagram in the generic form accepted by
/// [`rotation_face_count`], with `subdivide` extra degree-2 vertices inserted
/// on the first arc.
pub fn rotation_system(json: &DiagramJson, subdivide: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut dart: HashMap<HalfEdgeId, usize> = HashMap::new();
    let mut rotation = Vec::new();
    for c in &json.crossings {
        let mut around = Vec::new();
        for h in &c.slots {
            let n = dart.len();
            dart.insert(*h, n);
            around.push(n);
        }
        rotation.push(around);
    }
    if json.crossings.is_empty() {
        // a free loop becomes one vertex of degree 2
        for h in &json.arcs[0].ends {
            let n = dart.len();
            dart.insert(*h, n);
        }
        rotation.push(vec![0, 1]);
    }
    let mut mate = vec![0; dart.len()];
    for (i, a) in json.arcs.iter().enumerate() {
        let (x, y) = (dart[&a.ends[0]], dart[&a.ends[1]]);
        if i == 0 && subdivide > 0 {
            let mut prev = x;
            for _ in 0..subdivide {
                let (p, q) = (mate.len(), mate.len() + 1);
                mate.push(0);
                mate.push(0);
                mate[prev] = p;
                mate[p] = prev;
                rotation.push(vec![p, q]);
                prev = q;
            }
            mate[prev] = y;
            mate[y] = prev;
        } else {
            mate[x] = y;
            mate[y] = x;
        }
    }
    (rotation, mate)
}

pub fn euler_characteristic(rotation: &[Vec<usize>], mate: &[usize]) -> i64 {
    let v = rotation.len() as i64;
    let e = mate.len() as i64 / 2;
    let f = rotation_face_count(rotation, mate) as i64;
    v - e + f
}

/// A plain multigraph for path enumeration. Parallel edges are distinct.
#[derive(Debug, Clone, Default)]
pub struct OracleGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, String)>,
}

impl OracleGraph {
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (i, (u, v, _)) in self.edges.iter().enumerate() {
            adj[*u].push((i, *v));
            if u != v {
                adj[*v].push((i, *u));
            }
        }
        adj
    }
}

pub const PATH_BOUND_LIMIT: usize = 32;
pub const VERTEX_LIMIT: usize = 10_000;

/// Simple paths (as edge-index lists) from `start` to any vertex of
/// `targets`, with at most `bound` edges; stops after `limit` paths.
pub fn brute_paths(
    g: &OracleGraph,
    start: usize,
    targets: &BTreeSet<usize>,
    bound: usize,
    limit: usize,
) -> Result<Vec<Vec<usize>>, OracleError> {
    if bound > PATH_BOUND_LIMIT {
        return Err(OracleError::BoundExceeded { bound, limit: PATH_BOUND_LIMIT });
    }
    if g.vertex_count > VERTEX_LIMIT {
        return Err(OracleError::GraphTooLarge(g.vertex_count));
    }
    let adj = g.adjacency();
    let mut out = Vec::new();
    let mut on_path = vec![false; g.vertex_count];
    let mut path = Vec::new();
    fn dfs(
        v: usize,
        adj: &[Vec<(usize, usize)>],
        targets: &BTreeSet<usize>,
        bound: usize,
        limit: usize,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= limit {
            return;
        }
        if targets.contains(&v) {
            out.push(path.clone());
        }
        if path.len() == bound {
            return;
        }
        on_path[v] = true;
        for &(e, w) in &adj[v] {
            if !on_path[w] {
                path.push(e);
                dfs(w, adj, targets, bound, limit, on_path, path, out);
                path.pop();
            }
        }
        on_path[v] = false;
    }
    dfs(start, &adj, targets, bound, limit, &mut on_path, &mut path, &mut out);
    Ok(out)
}

/// Whether any target is reachable, by depth-first search with a global
/// visited set.
pub fn path_exists(g: &OracleGraph, start: usize, targets: &BTreeSet<usize>) -> bool {
    let adj = g.adjacency();
    let mut seen = vec![false; g.vertex_count];
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if targets.contains(&v) {
            return true;
        }
        stack.extend(adj[v].iter().map(|&(_, w)| w).filter(|w| !seen[*w]));
    }
    false
}

/// Isotopy class of a smoothed triangle disk: the pairing of its boundary
/// points plus the number of closed circles inside.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LocalClass {
    /// Boundary points are (arc id, end) with end 0 = start, 1 = end.
    pub pairs: Vec<((ArcId, u8), (ArcId, u8))>,
    pub circles: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct R3Table {
    pub before: BTreeMap<LocalClass, Vec<[Sign; 3]>>,
    pub after: BTreeMap<LocalClass, Vec<[Sign; 3]>>,
}

impl R3Table {
    pub fn before_only(&self) -> usize {
        self.before.keys().filter(|k| !self.after.contains_key(*k)).count()
    }

    pub fn after_only(&self) -> usize {
        self.after.keys().filter(|k| !self.before.contains_key(*k)).count()
    }

    /// Classes realized once on one side and several times on the other,
    /// with the size of that fan.
    pub fn fans(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, b) in &self.before {
            if let Some(a) = self.after.get(k) {
                if (b.len() == 1) != (a.len() == 1) {
                    out.push(b.len().max(a.len()));
                }
            }
        }
        out
    }

    /// Shared classes realized exactly once on each side.
    pub fn one_to_one(&self) -> usize {
        self.before
            .iter()
            .filter(|(k, b)| b.len() == 1 && self.after.get(*k).map(|a| a.len()) == Some(1))
            .count()
    }
}

fn local_classes(
    json: &DiagramJson,
    triple: [CrossingId; 3],
    triangle: [ArcId; 3],
) -> BTreeMap<LocalClass, Vec<[Sign; 3]>> {
    let entries = entry_slots(json);
    let mut index: HashMap<HalfEdgeId, usize> = HashMap::new();
    let mut slots_of = BTreeMap::new();
    for c in &json.crossings {
        if triple.contains(&c.id) {
            for h in &c.slots {
                let n = index.len();
                index.insert(*h, n);
            }
            slots_of.insert(c.id, c.slots.clone());
        }
    }
    let mut boundary: HashMap<usize, (ArcId, u8)> = HashMap::new();
    let mut inner = Vec::new();
    for a in &json.arcs {
        if triangle.contains(&a.id) {
            inner.push((index[&a.ends[0]], index[&a.ends[1]]));
        } else {
            for (end, h) in a.ends.iter().enumerate() {
                if let Some(&i) = index.get(h) {
                    boundary.insert(i, (a.id, end as u8));
                }
            }
        }
    }
    let mut out: BTreeMap<LocalClass, Vec<[Sign; 3]>> = BTreeMap::new();
    for mask in 0..8u8 {
        let signs: [Sign; 3] = std::array::from_fn(|i| {
            if mask & (4 >> i) != 0 {
                Sign::Negative
            } else {
                Sign::Positive
            }
        });
        let mut uf = UnionFind::<usize>::new(index.len());
        for &(x, y) in &inner {
            uf.union(x, y);
        }
        for (i, c) in triple.iter().enumerate() {
            let (first, second) = entries[c];
            for (x, y) in sign_pairs(first, second, signs[i]) {
                let slots = &slots_of[c];
                uf.union(index[&slots[x as usize]], index[&slots[y as usize]]);
            }
        }
        let mut groups: BTreeMap<usize, Vec<(ArcId, u8)>> = BTreeMap::new();
        let mut roots = BTreeSet::new();
        for i in 0..index.len() {
            let r = uf.find(i);
            roots.insert(r);
            if let Some(b) = boundary.get(&i) {
                groups.entry(r).or_default().push(*b);
            }
        }
        let mut pairs: Vec<_> = groups
            .values()
            .map(|g| {
                let mut g = g.clone();
                g.sort();
                (g[0], g[1])
            })
            .collect();
        pairs.sort();
        let circles = roots.len() - groups.len();
        out.entry(LocalClass { pairs, circles }).or_default().push(signs);
    }
    out
}

/// Exhaustive local smoothing tables on both sides of an R3 move.
pub fn brute_r3_local(
    before: &CurveDiagram,
    after: &CurveDiagram,
    triple: [CrossingId; 3],
    triangle: [ArcId; 3],
) -> R3Table {
    R3Table {
        before: local_classes(&before.to_json(), triple, triangle),
        after: local_classes(&after.to_json(), triple, triangle),
    }
}
