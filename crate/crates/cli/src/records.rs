use std::io::Write;

use serde::Serialize;

use crate::error::CliResult;

pub const CSV_HEADER: &str = "h,method,rel_error,runtime_micros";

/// One cell of a convergence sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub h: f64,
    pub method: String,
    pub rel_error: f64,
    pub runtime_micros: f64,
}

/// Orders by method name, then by decreasing step.
pub fn sort_records(records: &mut [ConvergenceRecord]) {
    records.sort_by(|a, b| a.method.cmp(&b.method).then(b.h.total_cmp(&a.h)));
}

pub fn write_csv<W: Write>(records: &[ConvergenceRecord], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
