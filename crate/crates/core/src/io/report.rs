use std::path::Path;

use super::{format_sig9, write_atomic};
use crate::error::Result;
use crate::pipeline::ScoreReport;

pub const CSV_HEADER: [&str; 6] = ["group", "axis", "raw", "baseline", "score", "verdict"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    /// Picks the format from a file extension; anything but `.csv` is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

pub fn report_to_json(report: &ScoreReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// One row per (group, axis); `verdict` is the group's verdict.
pub fn report_to_csv(report: &ScoreReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in &report.rows {
        let verdict = match report.is_good(&row.group) {
            Some(true) => "good",
            _ => "bad",
        };
        w.write_record([
            row.group.as_str(),
            row.axis.as_str(),
            &format_sig9(row.raw),
            &format_sig9(row.baseline),
            &format_sig9(row.score),
            verdict,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn write_report(report: &ScoreReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report_to_json(report),
        ReportFormat::Csv => report_to_csv(report),
    };
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{BaselineTable, LimbAxis, RawScores};
    use crate::pose::{Axis, Normalization};
    use crate::LimbGroupMap;

    fn report(raw_value: f64) -> ScoreReport {
        let map = LimbGroupMap::default();
        let keys: Vec<LimbAxis> = map
            .names()
            .flat_map(|g| Axis::BOTH.map(|a| LimbAxis::new(g, a)))
            .collect();
        let base: RawScores = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), 0.5 + i as f64 / 7.0))
            .collect();
        let baseline = BaselineTable::from_raw(&[base], Normalization::Pose, 1e-9).unwrap();
        let raw: RawScores = keys.iter().map(|k| (k.clone(), raw_value)).collect();
        ScoreReport::from_raw(&raw, &baseline, 1.0, "gold", "test").unwrap()
    }

    #[test]
    fn identity_report_csv() {
        let csv = report_to_csv(&report(0.0));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[0], "group,axis,raw,baseline,score,verdict");
        assert_eq!(lines[1], "head,x,0.0,0.5,0.0,good");
        assert!(lines[1..].iter().all(|l| l.split(',').nth(4) == Some("0.0")));
    }

    #[test]
    fn json_and_csv_agree() {
        let r = report(1.2345678);
        let json: ScoreReport = serde_json::from_str(&report_to_json(&r)).unwrap();
        assert_eq!(json, r);
        let text = report_to_csv(&r);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), json.rows.len());
        for (rec, row) in rows.iter().zip(&json.rows) {
            assert_eq!(&rec[0], row.group);
            assert_eq!(&rec[1], row.axis.as_str());
            for (cell, want) in [(&rec[2], row.raw), (&rec[3], row.baseline), (&rec[4], row.score)] {
                let got: f64 = cell.parse().unwrap();
                assert!((got - want).abs() <= 1e-8 * want.abs(), "{got} vs {want}");
            }
            let good = json.is_good(&row.group).unwrap();
            assert_eq!(&rec[5], if good { "good" } else { "bad" });
        }
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(ReportFormat::from_path(Path::new("a.CSV")), ReportFormat::Csv);
        assert_eq!(ReportFormat::from_path(Path::new("a.json")), ReportFormat::Json);
        assert_eq!(ReportFormat::from_path(Path::new("-")), ReportFormat::Json);
    }
}
