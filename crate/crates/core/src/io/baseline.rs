//! Baseline tables on disk (`mnmdtw-baseline/1`, JSON).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_text, write_atomic};
use crate::error::{Error, Result};
use crate::pipeline::{BaselineTable, LimbAxis};
use crate::pose::{Axis, Normalization};

pub const BASELINE_VERSION: &str = "mnmdtw-baseline/1";

#[derive(Serialize, Deserialize)]
struct BaselineFile {
    version: String,
    normalization: Normalization,
    cohort_size: usize,
    entries: Vec<Entry>,
    #[serde(default)]
    floored: Vec<LimbAxis>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    group: String,
    axis: Axis,
    baseline: f64,
}

pub fn baseline_to_string(table: &BaselineTable) -> String {
    let file = BaselineFile {
        version: BASELINE_VERSION.to_string(),
        normalization: table.normalization,
        cohort_size: table.cohort_size,
        entries: table
            .entries
            .iter()
            .map(|(k, &v)| Entry {
                group: k.group.clone(),
                axis: k.axis,
                baseline: v,
            })
            .collect(),
        floored: table.floored.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("baseline serializes");
    s.push('\n');
    s
}

pub fn parse_baseline(text: &str, path: &Path) -> Result<BaselineTable> {
    let file: BaselineFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let schema = |message: String| Error::Schema {
        path: path.to_path_buf(),
        frame: None,
        message,
    };
    if file.version != BASELINE_VERSION {
        return Err(schema(format!(
            "version `{}`, expected `{BASELINE_VERSION}`",
            file.version
        )));
    }
    if file.cohort_size == 0 {
        return Err(schema("cohort_size must be positive".into()));
    }
    let mut entries = crate::pipeline::RawScores::new();
    for e in file.entries {
        if !(e.baseline.is_finite() && e.baseline > 0.0) {
            return Err(schema(format!("baseline ({}, {}) must be positive", e.group, e.axis)));
        }
        let key = LimbAxis::new(e.group, e.axis);
        if entries.insert(key.clone(), e.baseline).is_some() {
            return Err(schema(format!("duplicate entry ({}, {})", key.group, key.axis)));
        }
    }
    Ok(BaselineTable {
        entries,
        cohort_size: file.cohort_size,
        normalization: file.normalization,
        floored: file.floored,
    })
}

pub fn read_baseline(path: &Path) -> Result<BaselineTable> {
    parse_baseline(&read_text(path)?, path)
}

pub fn write_baseline(table: &BaselineTable, path: &Path) -> Result<()> {
    write_atomic(path, baseline_to_string(table).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::RawScores;

    #[test]
    fn round_trip() {
        let raw: RawScores = [
            (LimbAxis::new("head", Axis::X), 0.25),
            (LimbAxis::new("head", Axis::Y), 0.0),
        ]
        .into_iter()
        .collect();
        let table = BaselineTable::from_raw(&[raw], Normalization::PerChannel, 1e-9).unwrap();
        let text = baseline_to_string(&table);
        let back = parse_baseline(&text, Path::new("b.json")).unwrap();
        assert_eq!(back, table);
        assert!(text.contains("\"per-channel\""));
    }

    #[test]
    fn rejects_non_positive_entries() {
        let text = r#"{"version": "mnmdtw-baseline/1", "normalization": "pose", "cohort_size": 1,
            "entries": [{"group": "head", "axis": "x", "baseline": 0.0}]}"#;
        assert!(matches!(
            parse_baseline(text, Path::new("b")),
            Err(Error::Schema { .. })
        ));
        assert!(matches!(parse_baseline("[]", Path::new("b")), Err(Error::Parse { .. })));
    }
}
