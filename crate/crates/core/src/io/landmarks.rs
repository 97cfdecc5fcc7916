//! The `mnmdtw-landmarks/1` recording format.
//!
//! ```json
//! {
//!   "header": {"version": "mnmdtw-landmarks/1", "fps": 30.0, "landmark_count": 33, "label": null, "source": null},
//!   "frames": [
//!     [{"x": 961.2, "y": 420.0, "z": null, "visibility": 0.98}, ...33 records],
//!     ...
//!   ]
//! }
//! ```
//!
//! The writer emits a canonical layout: fixed key order, one frame per line,
//! numbers rounded to 9 significant digits. Reading and writing again
//! reproduces the file byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::{format_sig9, read_text, write_atomic};
use crate::error::{Error, Result};
use crate::pose::{Landmark, LandmarkFrame, PoseSequence, LANDMARK_COUNT};

pub const LANDMARK_VERSION: &str = "mnmdtw-landmarks/1";

#[derive(Deserialize)]
struct RawFile {
    header: RawHeader,
    frames: Vec<Vec<RawLandmark>>,
}

#[derive(Deserialize)]
struct RawHeader {
    version: String,
    fps: f64,
    landmark_count: usize,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    source: Option<String>,
}

#[derive(Deserialize)]
struct RawLandmark {
    #[serde(default)]
    x: Option<f64>,
    #[serde(default)]
    y: Option<f64>,
    #[serde(default)]
    z: Option<f64>,
    #[serde(default)]
    visibility: Option<f64>,
}

/// Parses and validates landmark file contents. `path` is only used in errors.
pub fn parse_landmarks(text: &str, path: &Path) -> Result<PoseSequence> {
    let schema = |frame: Option<usize>, message: String| Error::Schema {
        path: path.to_path_buf(),
        frame,
        message,
    };
    let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;

    let h = &raw.header;
    if h.version != LANDMARK_VERSION {
        return Err(schema(
            None,
            format!("version `{}`, expected `{LANDMARK_VERSION}`", h.version),
        ));
    }
    if h.landmark_count != LANDMARK_COUNT {
        return Err(schema(
            None,
            format!("landmark_count {}, expected {LANDMARK_COUNT}", h.landmark_count),
        ));
    }
    if !(h.fps.is_finite() && h.fps > 0.0) {
        return Err(schema(None, format!("fps must be positive, got {}", h.fps)));
    }

    let mut frames = Vec::with_capacity(raw.frames.len());
    for (f, records) in raw.frames.into_iter().enumerate() {
        if records.len() != LANDMARK_COUNT {
            return Err(schema(
                Some(f),
                format!("{} landmarks, expected {LANDMARK_COUNT}", records.len()),
            ));
        }
        let mut landmarks = Vec::with_capacity(LANDMARK_COUNT);
        for (l, r) in records.into_iter().enumerate() {
            let (Some(x), Some(y)) = (r.x, r.y) else {
                return Err(schema(Some(f), format!("landmark {l} is missing x or y")));
            };
            if let Some(v) = r.visibility {
                if !(0.0..=1.0).contains(&v) {
                    return Err(schema(Some(f), format!("landmark {l} visibility {v} outside [0, 1]")));
                }
            }
            landmarks.push(Landmark {
                x,
                y,
                z: r.z,
                visibility: r.visibility,
            });
        }
        frames.push(LandmarkFrame::new(landmarks).map_err(|e| schema(Some(f), e.to_string()))?);
    }

    let mut seq = PoseSequence::new(frames, h.fps).map_err(|e| schema(None, e.to_string()))?;
    seq.label = raw.header.label;
    seq.source = raw.header.source;
    Ok(seq)
}

pub fn read_landmarks(path: &Path) -> Result<PoseSequence> {
    parse_landmarks(&read_text(path)?, path)
}

fn opt_number(v: Option<f64>) -> String {
    v.map_or_else(|| "null".to_string(), format_sig9)
}

fn opt_string(v: Option<&str>) -> String {
    v.map_or_else(
        || "null".to_string(),
        |s| serde_json::to_string(s).expect("strings always serialize"),
    )
}

/// Canonical text of a recording.
pub fn landmarks_to_string(seq: &PoseSequence) -> String {
    let mut out = String::with_capacity(seq.len() * LANDMARK_COUNT * 64);
    out.push_str("{\n  \"header\": {");
    let _ = write!(
        out,
        "\"version\": \"{LANDMARK_VERSION}\", \"fps\": {}, \"landmark_count\": {LANDMARK_COUNT}, \"label\": {}, \"source\": {}",
        format_sig9(seq.fps()),
        opt_string(seq.label.as_deref()),
        opt_string(seq.source.as_deref()),
    );
    out.push_str("},\n  \"frames\": [\n");
    for (f, frame) in seq.frames().iter().enumerate() {
        out.push_str("    [");
        for (l, lm) in frame.landmarks().iter().enumerate() {
            if l > 0 {
                out.push_str(", ");
            }
            let _ = write!(
                out,
                "{{\"x\": {}, \"y\": {}, \"z\": {}, \"visibility\": {}}}",
                format_sig9(lm.x),
                format_sig9(lm.y),
                opt_number(lm.z),
                opt_number(lm.visibility)
            );
        }
        out.push(']');
        if f + 1 < seq.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn write_landmarks(seq: &PoseSequence, path: &Path) -> Result<()> {
    write_atomic(path, landmarks_to_string(seq).as_bytes())
}
