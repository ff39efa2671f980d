//! Drawing a resolved curve: each smoothed crossing is replaced by two
//! chords inside a small disk, and the polyline is unchanged elsewhere.

use serde::{Deserialize, Serialize};

use super::{dist, lerp, Extracted, GeometryError, Point, PolylineFrame};
use crate::diagram::CrossingId;
use crate::smoothing::{Resolution, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusPolicy {
    /// Disk radius; the largest admissible one when `None`.
    pub radius: Option<f64>,
    /// Bound on the total length the disks may add.
    pub epsilon: f64,
    /// Shrink a radius that is too large instead of failing.
    pub auto_shrink: bool,
}

impl Default for RadiusPolicy {
    fn default() -> Self {
        RadiusPolicy { radius: None, epsilon: 1e-2, auto_shrink: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Realized {
    pub frame: PolylineFrame,
    pub radius: f64,
    /// Upper bound on the length added: four radii per disk.
    pub surcharge: f64,
    pub disks: Vec<Point>,
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, lerp(a, b, t))
}

fn unit(a: Point, b: Point) -> Point {
    let l = dist(a, b);
    [(b[0] - a[0]) / l, (b[1] - a[1]) / l]
}

/// Largest radius at `c` for which the disk meets only the two crossing
/// strands, leaves their segments before reaching a vertex, and stays clear
/// of every other disk.
fn radius_limit(f: &PolylineFrame, e: &Extracted, c: CrossingId) -> f64 {
    let a = &e.anchors[&c];
    let x = a.point;
    let segs = [a.visits[0].0, a.visits[1].0];
    let mut lim = f64::INFINITY;
    for s in segs {
        let (p, q) = f.segment(s);
        lim = lim.min(dist(x, p)).min(dist(x, q));
    }
    for s in 0..f.points.len() {
        if !segs.contains(&s) {
            let (p, q) = f.segment(s);
            lim = lim.min(point_segment_distance(x, p, q));
        }
    }
    for (d, other) in &e.anchors {
        if *d != c {
            lim = lim.min(dist(x, other.point) / 2.0);
        }
    }
    0.45 * lim
}

#[derive(Clone, Copy)]
struct Cut {
    seg: usize,
    t: f64,
    /// Where the curve reaches the disk and where it leaves it.
    arrive: Point,
    leave: Point,
}

/// Smooth the crossings `r` assigns on the polyline `f`. Crossing ids in `r`
/// are those of `e`, which must have been read off `f`.
pub fn realize_resolution(
    f: &PolylineFrame,
    e: &Extracted,
    r: &Resolution,
    policy: &RadiusPolicy,
) -> Result<Realized, GeometryError> {
    if !(policy.epsilon > 0.0) {
        return Err(GeometryError::BadEpsilon);
    }
    if r.is_empty() {
        return Ok(Realized { frame: f.clone(), radius: 0.0, surcharge: 0.0, disks: vec![] });
    }
    for c in r.crossings() {
        if !e.anchors.contains_key(&c) {
            return Err(GeometryError::MissingAnchors(c));
        }
    }
    let (limit, tightest) = r
        .crossings()
        .into_iter()
        .map(|c| (radius_limit(f, e, c), c))
        .fold((f64::INFINITY, CrossingId(0)), |a, b| if b.0 < a.0 { b } else { a });
    let k = r.len() as f64;
    let budget = policy.epsilon / (4.0 * k);
    let radius = match policy.radius {
        None => limit.min(budget),
        Some(rad) if rad <= limit && 4.0 * k * rad <= policy.epsilon => rad,
        Some(_) if policy.auto_shrink => limit.min(budget),
        Some(rad) => {
            return Err(GeometryError::RadiusTooLarge { crossing: tightest, radius: rad, limit: limit.min(budget) })
        }
    };

    // cuts[i] = (crossing, visit) in curve order
    let mut cuts: Vec<(Cut, CrossingId, usize)> = Vec::new();
    for (c, _) in r.iter() {
        let a = &e.anchors[&c];
        for (v, &(seg, t)) in a.visits.iter().enumerate() {
            let (p, q) = f.segment(seg);
            let u = unit(p, q);
            let x = a.point;
            let cut = Cut {
                seg,
                t,
                arrive: [x[0] - radius * u[0], x[1] - radius * u[1]],
                leave: [x[0] + radius * u[0], x[1] + radius * u[1]],
            };
            cuts.push((cut, c, v));
        }
    }
    cuts.sort_by(|a, b| (a.0.seg, a.0.t).partial_cmp(&(b.0.seg, b.0.t)).unwrap());
    let m = cuts.len();
    let n = f.points.len();
    let pos = |c: CrossingId, v: usize| cuts.iter().position(|x| x.1 == c && x.2 == v).unwrap();

    // piece i runs from cut i's leave point to cut i+1's arrive point
    let piece = |i: usize| -> Vec<Point> {
        let (a, b) = (cuts[i].0, cuts[(i + 1) % m].0);
        let mut pts = vec![a.leave];
        let same = a.seg == b.seg && b.t > a.t && (i + 1) < m;
        if !same {
            let mut s = a.seg;
            loop {
                s = (s + 1) % n;
                pts.push(f.points[s]);
                if s == b.seg {
                    break;
                }
            }
        }
        pts.push(b.arrive);
        pts
    };

    // node 2i is cut i's arrive end, 2i+1 its leave end
    let mut chord = vec![0usize; 2 * m];
    for (c, sign) in r.iter() {
        let (a, b) = (pos(c, 0), pos(c, 1));
        let pairs = match sign {
            Sign::Positive => [(2 * a, 2 * b + 1), (2 * b, 2 * a + 1)],
            Sign::Negative => [(2 * a, 2 * b), (2 * a + 1, 2 * b + 1)],
        };
        for (x, y) in pairs {
            chord[x] = y;
            chord[y] = x;
        }
    }

    let mut used = vec![false; m];
    let mut components = 0;
    let mut points = Vec::new();
    for start in 0..m {
        if used[start] {
            continue;
        }
        components += 1;
        // leave node of `start`, walking forward
        let mut node = 2 * start + 1;
        loop {
            let cut = node / 2;
            let (idx, forward) = if node % 2 == 1 { (cut, true) } else { ((cut + m - 1) % m, false) };
            if used[idx] {
                break;
            }
            used[idx] = true;
            let mut pts = piece(idx);
            let end = if forward { 2 * ((idx + 1) % m) } else { 2 * idx + 1 };
            if !forward {
                pts.reverse();
            }
            if components == 1 {
                points.extend(pts);
            }
            node = chord[end];
        }
    }
    if components > 1 {
        return Err(GeometryError::Disconnected(components));
    }
    points.dedup();
    if points.len() > 1 && points.first() == points.last() {
        points.pop();
    }
    Ok(Realized {
        frame: PolylineFrame::new(f.t, points),
        radius,
        surcharge: 4.0 * k * radius,
        disks: r.crossings().iter().map(|c| e.anchors[c].point).collect(),
    })
}

/// Frames scaling `f` down to its centroid; homotheties keep a simple curve
/// simple.
pub fn shrink_to_point(f: &PolylineFrame, steps: usize) -> Vec<PolylineFrame> {
    let k = f.points.len() as f64;
    let c = [
        f.points.iter().map(|p| p[0]).sum::<f64>() / k,
        f.points.iter().map(|p| p[1]).sum::<f64>() / k,
    ];
    (1..=steps)
        .map(|i| {
            let s = 1.0 - i as f64 / (steps as f64 + 1.0);
            PolylineFrame::new(f.t, f.points.iter().map(|p| lerp(c, *p, s)).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::extract_diagram;

    fn figure_eight() -> PolylineFrame {
        PolylineFrame::new(0.0, vec![[1.0, 1.0], [2.0, 0.0], [1.0, -1.0], [-1.0, 1.0], [-2.0, 0.0], [-1.0, -1.0]])
    }

    fn simple(f: &PolylineFrame) -> bool {
        extract_diagram(f).map(|e| e.diagram.crossing_count() == 0).unwrap_or(false)
    }

    #[test]
    fn empty_resolution_is_the_same_frame() {
        let f = figure_eight();
        let e = extract_diagram(&f).unwrap();
        let out = realize_resolution(&f, &e, &Resolution::empty(), &RadiusPolicy::default()).unwrap();
        assert_eq!(out.frame, f);
    }

    #[test]
    fn kink_smooths_one_way_only() {
        let f = figure_eight();
        let e = extract_diagram(&f).unwrap();
        let c = CrossingId(1);
        let policy = RadiusPolicy::default();
        let neg = realize_resolution(&f, &e, &Resolution::from_signs([(c, Sign::Negative)]), &policy).unwrap();
        assert!(simple(&neg.frame));
        assert!(neg.frame.length() <= f.length() + neg.surcharge);
        assert!(neg.surcharge <= policy.epsilon);
        // vertices away from the crossing are untouched
        for p in &f.points {
            assert!(neg.frame.points.contains(p));
        }
        let pos = realize_resolution(&f, &e, &Resolution::from_signs([(c, Sign::Positive)]), &policy);
        assert_eq!(pos, Err(GeometryError::Disconnected(2)));
    }

    #[test]
    fn oversized_radius_fails_without_shrink() {
        let f = figure_eight();
        let e = extract_diagram(&f).unwrap();
        let r = Resolution::from_signs([(CrossingId(1), Sign::Negative)]);
        let policy = RadiusPolicy { radius: Some(0.9), epsilon: 10.0, auto_shrink: false };
        assert!(matches!(realize_resolution(&f, &e, &r, &policy), Err(GeometryError::RadiusTooLarge { .. })));
        let shrunk = realize_resolution(&f, &e, &r, &RadiusPolicy { auto_shrink: true, ..policy }).unwrap();
        assert!(shrunk.radius < 0.9);
    }

    #[test]
    fn shrinking_keeps_the_curve_simple() {
        let f = PolylineFrame::new(0.0, vec![[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [2.0, 1.0], [0.0, 3.0]]);
        for g in shrink_to_point(&f, 5) {
            assert!(simple(&g));
            assert!(g.length() < f.length());
        }
    }
}
