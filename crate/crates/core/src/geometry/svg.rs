//! SVG rendering of polyline steps.

use std::fmt::Write;

use super::Point;

/// One step to draw: a closed polyline, its crossing disks and their radius.
#[derive(Clone, Debug, PartialEq)]
pub struct SvgFrame {
    pub points: Vec<Point>,
    pub crossings: Vec<Point>,
    pub radius: Option<f64>,
}

const SIZE: f64 = 600.0;

/// One SVG 1.1 document per frame, all sharing the same view box so that a
/// sequence of them lines up.
pub fn render_svg(frames: &[SvgFrame]) -> Vec<String> {
    let all = frames.iter().flat_map(|f| f.points.iter().chain(&f.crossings));
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if frames.is_empty() {
        return vec![];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let margin = 0.05 * span;
    let side = span + 2.0 * margin;
    let stroke = side / 300.0;
    // y is flipped so the picture has the usual orientation
    let (x0, y0) = (lo[0] - margin, -hi[1] - margin);
    frames
        .iter()
        .map(|f| {
            let mut s = String::new();
            writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
            writeln!(
                s,
                r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="{x0} {y0} {side} {side}">"#
            )
            .unwrap();
            if let Some(r) = f.radius {
                for c in &f.crossings {
                    writeln!(
                        s,
                        r##"<circle class="disk" cx="{}" cy="{}" r="{r}" fill="none" stroke="#c0392b" stroke-width="{}"/>"##,
                        c[0],
                        -c[1],
                        stroke / 2.0
                    )
                    .unwrap();
                }
            }
            let mut d = String::new();
            for (i, p) in f.points.iter().enumerate() {
                write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, p[0], -p[1]).unwrap();
            }
            d.push('Z');
            writeln!(s, r##"<path d="{d}" fill="none" stroke="#1f3b73" stroke-width="{stroke}"/>"##).unwrap();
            if f.radius.is_none() {
                for c in &f.crossings {
                    writeln!(s, r##"<circle class="crossing" cx="{}" cy="{}" r="{}" fill="#c0392b"/>"##, c[0], -c[1], 2.0 * stroke)
                        .unwrap();
                }
            }
            s.push_str("</svg>\n");
            s
        })
        .collect()
}

/// Subpaths of every `<path>` element, in model coordinates. Only the
/// absolute M/L/Z commands written by `render_svg` are understood.
pub fn svg_path_points(svg: &str) -> Option<Vec<Vec<Point>>> {
    let mut out = Vec::new();
    for chunk in svg.split("<path").skip(1) {
        let start = chunk.find(" d=\"")? + 4;
        let end = start + chunk[start..].find('"')?;
        let mut current: Vec<Point> = Vec::new();
        let mut nums: Vec<f64> = Vec::new();
        for tok in chunk[start..end].split_whitespace() {
            let (cmd, rest) = match tok.chars().next()? {
                c @ ('M' | 'L' | 'Z') => (Some(c), &tok[1..]),
                _ => (None, tok),
            };
            if cmd == Some('M') && !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            if cmd == Some('Z') {
                out.push(std::mem::take(&mut current));
                continue;
            }
            if !rest.is_empty() {
                nums.push(rest.parse().ok()?);
            }
            if nums.len() == 2 {
                current.push([nums[0], -nums[1]]);
                nums.clear();
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_no_documents() {
        assert!(render_svg(&[]).is_empty());
    }

    #[test]
    fn path_round_trips() {
        let pts = vec![[0.0, 0.0], [1.5, -0.25], [0.1, 1.0 / 3.0]];
        let docs = render_svg(&[SvgFrame { points: pts.clone(), crossings: vec![[0.5, 0.5]], radius: Some(0.1) }]);
        assert_eq!(docs.len(), 1);
        assert!(docs[0].contains(r#"class="disk""#));
        assert_eq!(svg_path_points(&docs[0]).unwrap(), vec![pts]);
    }

    #[test]
    fn rendering_is_deterministic() {
        let f = SvgFrame { points: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], crossings: vec![], radius: None };
        assert_eq!(render_svg(&[f.clone()]), render_svg(&[f]));
    }
}
