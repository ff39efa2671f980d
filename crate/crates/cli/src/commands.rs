use std::path::Path;

use curve_homotopy::gamma::{build_gamma, check_parity, find_isotopy_path, verify_trace, Orientation};
use curve_homotopy::geometry::{
    detect_events, realize_trace, render_steps, schoenflies_demo, DemoOptions, Detection, GeometryError,
    RadiusPolicy, LENGTH_TOLERANCE,
};
use curve_homotopy::halving::{perturb_double, verify_selection, HalvingOutcome};
use curve_homotopy::moves::elaborate_script;
use curve_homotopy::{ElaboratedScript, IsotopyTrace};
use serde_json::json;

use crate::failure::Failure;
use crate::input::{self, Input};
use crate::Options;

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Failure::invariant)?;
    text.push('\n');
    write_text(path, &text)
}

fn write_svgs(dir: &Path, svgs: &[String]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    for (i, svg) in svgs.iter().enumerate() {
        write_text(&dir.join(format!("step_{i:04}.svg")), svg)?;
    }
    Ok(())
}

fn counts_line(s: &ElaboratedScript) -> String {
    s.crossing_counts().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn orientation_flag(o: Orientation) -> char {
    match o {
        Orientation::Same => '+',
        Orientation::Reversed => '-',
    }
}

pub fn validate(path: &Path) -> Result<(), Failure> {
    let script = match input::load(path)? {
        Input::Script(s) => s,
        Input::Keyframes(h) => detect_events(&h)?.script,
        Input::Diagram(d) => {
            println!("crossings: {}", d.crossing_count());
            return Ok(());
        }
    };
    let s = elaborate_script(&script)?;
    println!("crossings: {}", counts_line(&s));
    Ok(())
}

/// Resolution graph, parity check, path search and verification.
fn isotopy(s: &ElaboratedScript, cap: usize) -> Result<IsotopyTrace, Failure> {
    let g = build_gamma(s, cap)?;
    let parity = check_parity(&g);
    if !parity.passed() {
        return Err(Failure::invariant(format!("parity check failed at {:?}", parity.offenders)));
    }
    let trace = find_isotopy_path(s, &g)?;
    let violations = verify_trace(s, &trace);
    if !violations.is_empty() {
        return Err(Failure::invariant(format!("trace verification failed: {violations:?}")));
    }
    Ok(trace)
}

pub fn isotope(path: &Path, opts: &Options) -> Result<(), Failure> {
    let (script, detection) = match input::load(path)? {
        Input::Script(s) => (s, None),
        Input::Keyframes(h) => {
            let d = detect_events(&h)?;
            (d.script.clone(), Some(d))
        }
        Input::Diagram(_) => return Err(Failure::input("expected a move script or keyframes")),
    };
    let s = elaborate_script(&script)?;
    let trace = isotopy(&s, opts.cap)?;
    if let Some(out) = &opts.out {
        write_json(out, &json!({ "crossing_counts": s.crossing_counts(), "trace": trace }))?;
    }
    if let Some(dir) = &opts.svg {
        let Some(d) = detection else {
            return Err(Failure::input("--svg needs keyframe input to draw on"));
        };
        write_svgs(dir, &realized_svgs(&d, &trace, opts)?)?;
    }
    println!("steps: {}", trace.steps.len());
    println!("final orientation: {}", orientation_flag(trace.final_orientation));
    Ok(())
}

fn realized_svgs(d: &Detection, trace: &IsotopyTrace, opts: &Options) -> Result<Vec<String>, Failure> {
    let policy = RadiusPolicy { radius: opts.radius, epsilon: opts.epsilon, auto_shrink: true };
    let steps = realize_trace(d, trace, &policy)?;
    let max = d.frames.iter().map(|f| f.length()).fold(0.0, f64::max);
    for (i, s) in steps.iter().enumerate() {
        let length = s.realized.frame.length();
        if length > max + opts.epsilon + LENGTH_TOLERANCE {
            return Err(GeometryError::LengthBound { step: i, length }.into());
        }
    }
    Ok(render_steps(&steps))
}

pub fn halve(alpha: &Path, script: &Path, opts: &Options) -> Result<(), Failure> {
    let alpha = input::diagram(alpha)?;
    let s = elaborate_script(&input::script(script)?)?;
    let dc = perturb_double(&alpha)?.rebase(&s.levels[0])?;
    let selection = curve_homotopy::halving::halve(&s, &dc)?;
    let violations = verify_selection(&s, &dc, &selection);
    if !violations.is_empty() {
        return Err(Failure::invariant(format!("selection verification failed: {violations:?}")));
    }
    if let Some(out) = &opts.out {
        write_json(
            out,
            &json!({
                "doubled_crossings": dc.beta.crossing_count(),
                "base": dc.base,
                "clusters": dc.clusters,
                "selection": selection,
            }),
        )?;
    }
    println!("doubled curve crossings: {}", dc.beta.crossing_count());
    match selection.outcome {
        HalvingOutcome::Point => println!("outcome: point"),
        HalvingOutcome::ResumeAtLevel => {
            println!("outcome: resume_at_level {}", selection.resume_level.unwrap_or_default())
        }
    }
    Ok(())
}

pub fn ingest(path: &Path, opts: &Options) -> Result<(), Failure> {
    let d = detect_events(&input::keyframes(path)?)?;
    for entry in &d.log {
        println!("{}", serde_json::to_string(entry).map_err(Failure::invariant)?);
    }
    if let Some(out) = &opts.out {
        write_text(out, &(d.script.to_json_string() + "\n"))?;
    }
    Ok(())
}

pub fn schoenflies(path: &Path, samples: usize, opts: &Options) -> Result<(), Failure> {
    let h = input::keyframes(path)?;
    let polygon = h.frames.last().ok_or_else(|| Failure::input("no frames"))?;
    let demo_opts = DemoOptions { samples, epsilon: opts.epsilon, radius: opts.radius, seed: opts.seed, ..DemoOptions::default() };
    let out = schoenflies_demo(polygon, &demo_opts)?;
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir)?;
        write_text(&dir.join("script.json"), &(out.detection.script.to_json_string() + "\n"))?;
        write_json(&dir.join("trace.json"), &out.trace)?;
    }
    if let Some(dir) = opts.svg.as_ref().or(opts.out.as_ref()) {
        write_svgs(dir, &out.svgs)?;
    }
    let longest = out.steps.iter().map(|s| s.realized.frame.length()).fold(0.0, f64::max);
    println!("frames: {}", out.detection.frames.len());
    println!("moves: {}", out.detection.script.moves.len());
    println!("steps: {}", out.steps.len());
    println!("max frame length: {}", out.max_frame_length);
    println!("longest step: {longest}");
    Ok(())
}
