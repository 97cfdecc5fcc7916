//! File formats: landmark recordings, baseline tables, score reports, the
//! synchronized series dump, and the SVG bar chart.
//!
//! Every writer goes through [`write_atomic`]: output lands in a temporary
//! file next to the destination and is renamed into place only once it is
//! complete. A destination of `-` writes to standard output instead.

mod baseline;
mod chart;
mod landmarks;
mod report;
mod series;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub use baseline::{baseline_to_string, parse_baseline, read_baseline, write_baseline, BASELINE_VERSION};
pub use chart::{bar_chart_svg, render_bar_chart};
pub use landmarks::{landmarks_to_string, parse_landmarks, read_landmarks, write_landmarks, LANDMARK_VERSION};
pub use report::{report_to_csv, report_to_json, write_report, ReportFormat, CSV_HEADER};
pub use series::{series_to_csv, write_series_csv};

/// Formats `v` rounded to 9 significant digits, in the shortest decimal
/// form that reads back to the rounded value. Always contains a `.`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() {
            "0.0".to_string()
        } else {
            v.to_string()
        };
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    let mut s = rounded.to_string();
    if !s.contains('.') {
        s.push_str(".0");
    }
    s
}

pub(crate) fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

/// Writes `contents` to `path` via a temporary file and rename, or to
/// standard output when `path` is `-`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if is_stdout(path) {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(contents)
            .and_then(|_| out.flush())
            .map_err(|e| io_error(path, e));
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(contents).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}
