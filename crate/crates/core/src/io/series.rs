use std::path::Path;

use super::{format_sig9, write_atomic};
use crate::error::Result;
use crate::pose::{Axis, LANDMARK_COUNT, XY_DIMS};
use crate::series::MultiSeries;

/// CSV with one row per time step. A 66-column x/y series gets
/// `lm{i}_{axis}` headers; anything else gets `c{k}`.
pub fn series_to_csv(m: &MultiSeries) -> String {
    let header: Vec<String> = if m.dims() == XY_DIMS {
        (0..LANDMARK_COUNT)
            .flat_map(|l| Axis::BOTH.map(|a| format!("lm{l}_{a}")))
            .collect()
    } else {
        (0..m.dims()).map(|k| format!("c{k}")).collect()
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in m.rows() {
        w.write_record(row.iter().map(|&v| format_sig9(v)))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn write_series_csv(m: &MultiSeries, path: &Path) -> Result<()> {
    write_atomic(path, series_to_csv(m).as_bytes())
}
