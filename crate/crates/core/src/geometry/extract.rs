//! Reading a curve diagram off a closed polyline.

use std::collections::BTreeMap;

use robust::{orient2d, Coord};
use serde::Serialize;

use super::{dist, lerp, GeometryError, Point, PolylineFrame};
use crate::diagram::{ArcId, ArcJson, CrossingId, CrossingJson, CurveDiagram, DiagramJson, HalfEdgeId};

fn orient(a: Point, b: Point, c: Point) -> f64 {
    orient2d(Coord { x: a[0], y: a[1] }, Coord { x: b[0], y: b[1] }, Coord { x: c[0], y: c[1] })
}

/// Where a crossing sits on the polyline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingAnchor {
    pub point: Point,
    /// (segment index, parameter along the segment) of the two visits, in
    /// traversal order.
    pub visits: [(usize, f64); 2],
}

#[derive(Clone, Debug)]
pub struct Extracted {
    pub diagram: CurveDiagram,
    pub anchors: BTreeMap<CrossingId, CrossingAnchor>,
}

struct RawCrossing {
    segs: [usize; 2],
    params: [f64; 2],
    point: Point,
    /// Sign of the cross product of the first segment's direction with the
    /// second's.
    turn: f64,
}

fn non_generic(detail: &str, at: Point) -> GeometryError {
    GeometryError::NonGenericFrame { detail: detail.into(), at }
}

/// Every transverse crossing of two non-adjacent segments, rejecting
/// tangencies, overlaps, and vertices lying on other segments.
fn crossings(f: &PolylineFrame) -> Result<Vec<RawCrossing>, GeometryError> {
    let n = f.points.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = f.segment(i);
        for j in (i + 1)..n {
            let (c, d) = f.segment(j);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // shared vertex; reject a fold back along the same line
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if orient(p, shared, q) == 0.0 {
                    let u = [p[0] - shared[0], p[1] - shared[1]];
                    let v = [q[0] - shared[0], q[1] - shared[1]];
                    if u[0] * v[0] + u[1] * v[1] > 0.0 {
                        return Err(non_generic("segments fold back onto each other", shared));
                    }
                }
                continue;
            }
            let o1 = orient(a, b, c);
            let o2 = orient(a, b, d);
            let o3 = orient(c, d, a);
            let o4 = orient(c, d, b);
            if o1 == 0.0 && o2 == 0.0 {
                let axis = [b[0] - a[0], b[1] - a[1]];
                let proj = |p: Point| (p[0] - a[0]) * axis[0] + (p[1] - a[1]) * axis[1];
                let len2 = proj(b);
                let (lo, hi) = (proj(c).min(proj(d)), proj(c).max(proj(d)));
                if hi >= 0.0 && lo <= len2 {
                    return Err(non_generic("collinear segments overlap", c));
                }
                continue;
            }
            let straddle_cd = (o1 <= 0.0 && o2 >= 0.0) || (o1 >= 0.0 && o2 <= 0.0);
            let straddle_ab = (o3 <= 0.0 && o4 >= 0.0) || (o3 >= 0.0 && o4 <= 0.0);
            if !(straddle_cd && straddle_ab) {
                continue;
            }
            if o1 == 0.0 || o2 == 0.0 || o3 == 0.0 || o4 == 0.0 {
                let at = if o1 == 0.0 {
                    c
                } else if o2 == 0.0 {
                    d
                } else if o3 == 0.0 {
                    a
                } else {
                    b
                };
                return Err(non_generic("a vertex lies on another segment", at));
            }
            let ti = o3 / (o3 - o4);
            let tj = o1 / (o1 - o2);
            out.push(RawCrossing {
                segs: [i, j],
                params: [ti, tj],
                point: lerp(a, b, ti),
                turn: -o4.signum(),
            });
        }
    }
    let scale = f
        .points
        .iter()
        .flat_map(|p| [p[0].abs(), p[1].abs()])
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for (x, p) in out.iter().enumerate() {
        for q in &out[x + 1..] {
            if dist(p.point, q.point) <= 1e-12 * scale {
                return Err(non_generic("three strands meet in one point", p.point));
            }
        }
    }
    Ok(out)
}

/// The diagram of a generic closed polyline, with the location of every
/// crossing. Crossings are numbered from 1 in order of first visit from
/// point 0; the first strand through a crossing enters at slot 0.
pub fn extract_diagram(f: &PolylineFrame) -> Result<Extracted, GeometryError> {
    f.check()?;
    let raw = crossings(f)?;
    if raw.is_empty() {
        return Ok(Extracted { diagram: CurveDiagram::circle(), anchors: BTreeMap::new() });
    }
    // (segment, parameter, raw index, strand)
    let mut visits: Vec<(usize, f64, usize, usize)> = Vec::new();
    for (x, c) in raw.iter().enumerate() {
        visits.push((c.segs[0], c.params[0], x, 0));
        visits.push((c.segs[1], c.params[1], x, 1));
    }
    visits.sort_by(|p, q| (p.0, p.1).partial_cmp(&(q.0, q.1)).unwrap());

    let mut ids: BTreeMap<usize, CrossingId> = BTreeMap::new();
    let mut first_strand: BTreeMap<usize, usize> = BTreeMap::new();
    for v in &visits {
        if !ids.contains_key(&v.2) {
            ids.insert(v.2, CrossingId(ids.len() as u32 + 1));
            first_strand.insert(v.2, v.3);
        }
    }
    // entry slot of each visit
    let entry = |x: usize, strand: usize| -> u8 {
        if strand == first_strand[&x] {
            0
        } else {
            // turn is the sign for (raw first segment, raw second segment)
            let turn = if first_strand[&x] == 0 { raw[x].turn } else { -raw[x].turn };
            if turn > 0.0 {
                1
            } else {
                3
            }
        }
    };
    let half_edge = |c: CrossingId, slot: u8| HalfEdgeId(4 * c.0 + slot as u32);
    let n = visits.len();
    let arcs: Vec<ArcJson> = (0..n)
        .map(|k| {
            let (from, to) = (visits[k], visits[(k + 1) % n]);
            let out_slot = (entry(from.2, from.3) + 2) % 4;
            ArcJson {
                id: ArcId(k as u32 + 1),
                ends: [half_edge(ids[&from.2], out_slot), half_edge(ids[&to.2], entry(to.2, to.3))],
            }
        })
        .collect();
    let crossings_json = ids
        .values()
        .map(|&c| CrossingJson { id: c, slots: (0..4).map(|s| half_edge(c, s)).collect() })
        .collect();
    let json = DiagramJson { basepoint: arcs[0].ends[0], crossings: crossings_json, arcs, genus: 0 };
    let diagram = CurveDiagram::from_json(&json)?;

    let mut anchors = BTreeMap::new();
    for (&x, &id) in &ids {
        let c = &raw[x];
        let first = first_strand[&x];
        let second = 1 - first;
        anchors.insert(
            id,
            CrossingAnchor {
                point: c.point,
                visits: [(c.segs[first], c.params[first]), (c.segs[second], c.params[second])],
            },
        );
    }
    Ok(Extracted { diagram, anchors })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn figure_eight() -> PolylineFrame {
        PolylineFrame::new(
            0.0,
            vec![[1.0, 1.0], [2.0, 0.0], [1.0, -1.0], [-1.0, 1.0], [-2.0, 0.0], [-1.0, -1.0]],
        )
    }

    fn square() -> PolylineFrame {
        PolylineFrame::new(0.0, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    fn naive_count(f: &PolylineFrame) -> usize {
        // proper crossings of segment interiors by parametric solve
        let n = f.points.len();
        let mut count = 0;
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let ((a, b), (c, d)) = (f.segment(i), f.segment(j));
                let r = [b[0] - a[0], b[1] - a[1]];
                let s = [d[0] - c[0], d[1] - c[1]];
                let den = r[0] * s[1] - r[1] * s[0];
                if den == 0.0 {
                    continue;
                }
                let t = ((c[0] - a[0]) * s[1] - (c[1] - a[1]) * s[0]) / den;
                let u = ((c[0] - a[0]) * r[1] - (c[1] - a[1]) * r[0]) / den;
                if t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn convex_polygon_is_a_circle() {
        let e = extract_diagram(&square()).unwrap();
        assert_eq!(e.diagram.crossing_count(), 0);
        assert!(e.diagram.is_isomorphic(&CurveDiagram::circle()));
    }

    #[test]
    fn figure_eight_has_one_kink_crossing() {
        let f = figure_eight();
        let e = extract_diagram(&f).unwrap();
        assert_eq!(e.diagram.crossing_count(), naive_count(&f));
        assert_eq!(e.diagram.crossing_count(), 1);
        let kink = CurveDiagram::from_json(&crate::diagram::fixtures::kink()).unwrap();
        assert!(e.diagram.is_isomorphic(&kink));
        assert!(dist(e.anchors[&CrossingId(1)].point, [0.0, 0.0]) < 1e-12);
    }

    #[test]
    fn triple_point_is_rejected() {
        // three lines through the origin, traversed as a star
        let f = PolylineFrame::new(
            0.0,
            vec![[-2.0, 0.0], [2.0, 0.0], [2.0, 1.0], [-2.0, -1.0], [-1.0, -2.0], [1.0, 2.0], [0.0, 3.0]],
        );
        assert!(matches!(extract_diagram(&f), Err(GeometryError::NonGenericFrame { .. })));
    }

    #[test]
    fn vertex_on_segment_is_rejected() {
        let f = PolylineFrame::new(0.0, vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        assert!(extract_diagram(&f).is_err());
        let g = PolylineFrame::new(0.0, vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(extract_diagram(&g), Err(GeometryError::NonGenericFrame { .. })));
    }

    #[test]
    fn translation_and_power_of_two_scaling_preserve_crossings() {
        let f = figure_eight();
        let base = extract_diagram(&f).unwrap().diagram;
        for (shift, scale) in [(0.1, 1.0), (1e3, 4.0), (-7.3, 0.125), (0.0, 1024.0)] {
            let g = PolylineFrame::new(0.0, f.points.iter().map(|p| [p[0] * scale + shift, p[1] * scale - shift]).collect());
            let d = extract_diagram(&g).unwrap().diagram;
            assert_eq!(d, base);
        }
    }
}
