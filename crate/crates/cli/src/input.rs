//! Reading scripts, diagrams and keyframe files.

use std::path::Path;

use curve_homotopy::geometry::{KeyframesJson, PolylineHomotopy};
use curve_homotopy::moves::{elaborate_script, parse_script};
use curve_homotopy::{CurveDiagram, DiagramJson, ElaboratedScript, HomotopyScript};
use serde_json::Value;

use crate::failure::Failure;

pub enum Input {
    Script(HomotopyScript),
    Keyframes(PolylineHomotopy),
    Diagram(CurveDiagram),
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Keyframe files have `frames`, diagrams have `crossings`; anything else
/// is read as a move script.
pub fn load(path: &Path) -> Result<Input, Failure> {
    let text = read(path)?;
    let Ok(value) = serde_json::from_str::<Value>(&text) else {
        // let the script parser report where the text breaks
        return Ok(Input::Script(parse_script(&text)?));
    };
    if value.get("frames").is_some() {
        return keyframes_from(value).map(Input::Keyframes);
    }
    if value.get("crossings").is_some() && value.get("initial").is_none() {
        let d: DiagramJson = serde_json::from_value(value).map_err(Failure::input)?;
        return CurveDiagram::from_json(&d).map(Input::Diagram).map_err(Failure::input);
    }
    Ok(Input::Script(parse_script(&text)?))
}

fn keyframes_from(value: Value) -> Result<PolylineHomotopy, Failure> {
    let k: KeyframesJson = serde_json::from_value(value).map_err(|e| Failure::input(format!("keyframes: {e}")))?;
    let h: PolylineHomotopy = k.into();
    h.check()?;
    Ok(h)
}

pub fn keyframes(path: &Path) -> Result<PolylineHomotopy, Failure> {
    let value = json(path)?;
    keyframes_from(value)
}

pub fn script(path: &Path) -> Result<HomotopyScript, Failure> {
    Ok(parse_script(&read(path)?)?)
}

pub fn diagram(path: &Path) -> Result<CurveDiagram, Failure> {
    let value = json(path)?;
    let d: DiagramJson = serde_json::from_value(value).map_err(|e| Failure::input(format!("diagram: {e}")))?;
    CurveDiagram::from_json(&d).map_err(Failure::input)
}

/// The diagrams to examine: every level of a script, or a single diagram.
pub fn levels(path: &Path) -> Result<Vec<CurveDiagram>, Failure> {
    match load(path)? {
        Input::Script(s) => Ok(elaborate_script(&s)?.levels),
        Input::Diagram(d) => Ok(vec![d]),
        Input::Keyframes(_) => Err(Failure::input("expected a script or a diagram, found keyframes")),
    }
}

pub fn elaborated(path: &Path) -> Result<ElaboratedScript, Failure> {
    match load(path)? {
        Input::Script(s) => Ok(elaborate_script(&s)?),
        _ => Err(Failure::input("expected a move script")),
    }
}
