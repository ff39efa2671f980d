//! Straight-line homotopy from a round circle to a simple polygon, turned
//! into an isotopy of simple curves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::events::{Detection, Detector};
use super::realize::{realize_resolution, RadiusPolicy, Realized};
use super::svg::{render_svg, SvgFrame};
use super::{extract_diagram, GeometryError, Point, PolylineFrame, LENGTH_TOLERANCE};
use crate::gamma::{build_gamma, find_isotopy_path, IsotopyTrace};
use crate::moves::{elaborate_script, Terminal};
use crate::smoothing::{Resolution, DEFAULT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DemoOptions {
    pub samples: usize,
    pub epsilon: f64,
    pub radius: Option<f64>,
    pub seed: u64,
    /// Frames that may be inserted between samples before giving up.
    pub max_refinements: usize,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions { samples: 16, epsilon: 1e-2, radius: None, seed: 0, max_refinements: 4000 }
    }
}

/// Vertex-wise linear interpolation between a circle (t = 0) and a polygon
/// (t = 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interpolation {
    pub circle: Vec<Point>,
    pub polygon: Vec<Point>,
    /// Whether the circle points are the radial projections of the vertices.
    pub radial: bool,
}

impl Interpolation {
    pub fn frame(&self, t: f64) -> PolylineFrame {
        let pts = self
            .circle
            .iter()
            .zip(&self.polygon)
            .map(|(c, v)| [(1.0 - t) * c[0] + t * v[0], (1.0 - t) * c[1] + t * v[1]])
            .collect();
        PolylineFrame::new(t, pts)
    }
}

fn signed_area(p: &[Point]) -> f64 {
    let n = p.len();
    (0..n).map(|i| p[i][0] * p[(i + 1) % n][1] - p[(i + 1) % n][0] * p[i][1]).sum::<f64>() / 2.0
}

/// Pair every polygon vertex with a point of a circle around the vertex
/// centroid, traversed in the same direction. A polygon that is star-shaped
/// about the centroid gets radial projections, which keep every interpolant
/// simple; any other polygon gets the circle parametrized by arc length.
pub fn interpolation(polygon: &PolylineFrame) -> Interpolation {
    let p = &polygon.points;
    let n = p.len() as f64;
    let c = [p.iter().map(|q| q[0]).sum::<f64>() / n, p.iter().map(|q| q[1]).sum::<f64>() / n];
    let orient = if signed_area(p) >= 0.0 { 1.0 } else { -1.0 };
    let rel: Vec<Point> = p.iter().map(|q| [q[0] - c[0], q[1] - c[1]]).collect();
    let radius = rel.iter().map(|r| r[0].hypot(r[1])).fold(0.0, f64::max);
    let k = rel.len();
    let mut turn = 0.0;
    let mut star = rel.iter().all(|r| r[0] != 0.0 || r[1] != 0.0);
    for i in 0..k {
        let (a, b) = (rel[i], rel[(i + 1) % k]);
        let cross = a[0] * b[1] - a[1] * b[0];
        if orient * cross <= 0.0 {
            star = false;
        }
        turn += cross.atan2(a[0] * b[0] + a[1] * b[1]);
    }
    star &= (turn.abs() - std::f64::consts::TAU).abs() < 1e-6;

    let circle = if star {
        rel.iter()
            .map(|r| {
                let l = r[0].hypot(r[1]);
                [c[0] + radius * r[0] / l, c[1] + radius * r[1] / l]
            })
            .collect()
    } else {
        let total = polygon.length();
        let theta0 = rel[0][1].atan2(rel[0][0]);
        let mut s = 0.0;
        (0..k)
            .map(|i| {
                if i > 0 {
                    s += super::dist(p[i - 1], p[i]);
                }
                let a = theta0 + orient * std::f64::consts::TAU * s / total;
                [c[0] + radius * a.cos(), c[1] + radius * a.sin()]
            })
            .collect()
    };
    Interpolation { circle, polygon: p.clone(), radial: star }
}

/// One realized vertex of an isotopy trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizedStep {
    pub level: usize,
    pub frame: usize,
    /// Signs keyed by script crossing id.
    pub resolution: Resolution,
    pub realized: Realized,
}

#[derive(Clone, Debug)]
pub struct DemoArtifacts {
    pub detection: Detection,
    pub trace: IsotopyTrace,
    pub steps: Vec<RealizedStep>,
    pub max_frame_length: f64,
    pub svgs: Vec<String>,
}

/// Sample the straight-line homotopy, refining gaps that hold more than one
/// event and nudging samples that land on a degenerate frame.
fn sample(interp: &Interpolation, opts: &DemoOptions) -> Result<Detection, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut det = Detector::new(interp.frame(0.0))?;
    let m = opts.samples;
    let mut targets: Vec<f64> = (1..m).rev().map(|i| i as f64 / (m - 1) as f64).collect();
    let mut current = 0.0;
    let mut refinements = 0;
    while let Some(&t) = targets.last() {
        let err = match det.advance(interp.frame(t)) {
            Ok(_) => {
                current = t;
                targets.pop();
                continue;
            }
            Err(e) => e,
        };
        refinements += 1;
        if refinements > opts.max_refinements || t - current < 1e-12 {
            return Err(err);
        }
        match err {
            GeometryError::AmbiguousGap(..) => {
                let mid = current + (t - current) * rng.gen_range(0.4..0.6);
                targets.push(mid);
            }
            GeometryError::NonGenericFrame { .. } if t < 1.0 => {
                targets.pop();
                targets.push(t - (t - current) * rng.gen_range(1e-3..1e-2));
            }
            e => return Err(e),
        }
    }
    Ok(det.finish(Terminal::Curve))
}

/// Draw every vertex of `trace` on the keyframe its level was read from; the
/// last level is drawn on the last keyframe. Each drawing is checked to be
/// free of crossings.
pub fn realize_trace(
    detection: &Detection,
    trace: &IsotopyTrace,
    policy: &RadiusPolicy,
) -> Result<Vec<RealizedStep>, GeometryError> {
    let last_level = detection.levels.len() - 1;
    let last_frame = detection.frames.len() - 1;
    let mut steps = Vec::new();
    for (level, resolution) in trace.vertices() {
        let frame = if level == last_level { last_frame } else { detection.levels[level].frame };
        let map = &detection.frame_anchors[frame].1;
        let mut mapped = Resolution::empty();
        for (c, s) in resolution.iter() {
            mapped.set(*map.get(&c).ok_or(GeometryError::MissingAnchors(c))?, s);
        }
        let realized = realize_resolution(&detection.frames[frame], &detection.extracted[frame], &mapped, policy)?;
        let crossings = extract_diagram(&realized.frame)?.diagram.crossing_count();
        if crossings != 0 {
            return Err(GeometryError::RealizationNotSimple { step: steps.len(), crossings });
        }
        steps.push(RealizedStep { level, frame, resolution, realized });
    }
    Ok(steps)
}

/// One SVG document per step, with the smoothing disks drawn.
pub fn render_steps(steps: &[RealizedStep]) -> Vec<String> {
    render_svg(
        &steps
            .iter()
            .map(|s| SvgFrame {
                points: s.realized.frame.points.clone(),
                crossings: s.realized.disks.clone(),
                radius: (!s.realized.disks.is_empty()).then_some(s.realized.radius),
            })
            .collect::<Vec<_>>(),
    )
}

pub fn schoenflies_demo(polygon: &PolylineFrame, opts: &DemoOptions) -> Result<DemoArtifacts, GeometryError> {
    if !(opts.epsilon > 0.0) {
        return Err(GeometryError::BadEpsilon);
    }
    if opts.samples < 2 {
        return Err(GeometryError::TooFewSamples(opts.samples));
    }
    match extract_diagram(polygon) {
        Ok(e) if e.diagram.crossing_count() == 0 => {}
        Ok(_) | Err(GeometryError::NonGenericFrame { .. }) => return Err(GeometryError::SimplicityViolated),
        Err(e) => return Err(e),
    }
    let interp = interpolation(polygon);
    let detection = sample(&interp, opts)?;
    let script = elaborate_script(&detection.script)?;
    let gamma = build_gamma(&script, DEFAULT_CAP)?;
    let trace = find_isotopy_path(&script, &gamma)?;

    let max_frame_length = detection.frames.iter().map(PolylineFrame::length).fold(0.0, f64::max);
    let policy = RadiusPolicy { radius: opts.radius, epsilon: opts.epsilon, auto_shrink: true };
    let steps = realize_trace(&detection, &trace, &policy)?;
    for (i, s) in steps.iter().enumerate() {
        if s.realized.frame.length() > max_frame_length + opts.epsilon + LENGTH_TOLERANCE {
            return Err(GeometryError::LengthBound { step: i, length: s.realized.frame.length() });
        }
    }
    let svgs = render_steps(&steps);
    Ok(DemoArtifacts { detection, trace, steps, max_frame_length, svgs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular(n: usize) -> PolylineFrame {
        PolylineFrame::new(
            1.0,
            (0..n)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    [3.0 * a.cos() + 0.5, 2.0 * a.sin()]
                })
                .collect(),
        )
    }

    #[test]
    fn convex_polygon_never_crosses() {
        let p = regular(12);
        let interp = interpolation(&p);
        assert!(interp.radial);
        for i in 0..=50 {
            let f = interp.frame(i as f64 / 50.0);
            assert_eq!(extract_diagram(&f).unwrap().diagram.crossing_count(), 0);
        }
        let out = schoenflies_demo(&p, &DemoOptions::default()).unwrap();
        assert!(out.detection.script.moves.is_empty());
        assert_eq!(out.steps.len(), 1);
        assert_eq!(out.steps[0].realized.frame, p);
    }

    #[test]
    fn clockwise_polygon_interpolates_clockwise() {
        let mut p = regular(12);
        p.points.reverse();
        let interp = interpolation(&p);
        assert!(signed_area(&interp.circle) < 0.0);
    }

    #[test]
    fn self_crossing_polygon_is_refused() {
        let p = PolylineFrame::new(0.0, vec![[1.0, 1.0], [2.0, 0.0], [1.0, -1.0], [-1.0, 1.0], [-2.0, 0.0], [-1.0, -1.0]]);
        assert_eq!(schoenflies_demo(&p, &DemoOptions::default()).unwrap_err(), GeometryError::SimplicityViolated);
    }
}
