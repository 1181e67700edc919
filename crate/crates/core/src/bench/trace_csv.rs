//! Trace files: one row per logged iteration, floats with 17 significant
//! digits, empty fields for metrics that were not recorded.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::trace::IterationRecord;

pub const TRACE_HEADER: [&str; 11] = [
    "iter",
    "eta",
    "L_t",
    "hatL_t",
    "eg_residual",
    "nat_residual",
    "tan_residual",
    "gap",
    "dist_to_solution",
    "backtrack_failures",
    "elapsed_s",
];

/// Iterations up to this index are always logged; later ones every
/// `THIN_STRIDE`-th, plus the final row.
const FULL_ROWS: usize = 1000;
const THIN_STRIDE: usize = 10;

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidProblem(format!("trace i/o: {e}"))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

pub(crate) fn keep_row(t: usize, is_last: bool, thin: bool) -> bool {
    !thin || is_last || t <= FULL_ROWS || t.is_multiple_of(THIN_STRIDE)
}

/// Writes `records` with the trace header. With `thin` set, rows after the
/// first thousand iterations are subsampled.
pub fn write_trace<W: Write>(out: W, records: &[IterationRecord], thin: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER).map_err(io_err)?;
    for (i, r) in records.iter().enumerate() {
        if !keep_row(r.t, i + 1 == records.len(), thin) {
            continue;
        }
        w.write_record([
            r.t.to_string(),
            fmt(r.eta),
            fmt(r.l_t),
            fmt(r.hat_l_t),
            fmt(r.eg_residual),
            fmt_opt(r.nat_residual),
            fmt_opt(r.tan_residual),
            fmt_opt(r.gap),
            fmt_opt(r.dist_to_solution),
            r.backtrack_failures.to_string(),
            fmt(r.elapsed_seconds),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Parses a trace written by [`write_trace`].
pub fn read_trace<R: Read>(input: R) -> Result<Vec<IterationRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(io_err)?;
    if header.iter().ne(TRACE_HEADER) {
        return Err(io_err(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (row, rec) in rd.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        let field = |i: usize| -> Result<Option<f64>> {
            let s = &rec[i];
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| io_err(format!("row {}: bad {} '{s}'", row + 1, TRACE_HEADER[i])))
        };
        let req = |i: usize| field(i)?.ok_or_else(|| io_err(format!("row {}: missing {}", row + 1, TRACE_HEADER[i])));
        let int = |i: usize| {
            rec[i]
                .parse()
                .map_err(|_| io_err(format!("row {}: bad {}", row + 1, TRACE_HEADER[i])))
        };
        out.push(IterationRecord {
            t: int(0)?,
            eta: req(1)?,
            l_t: req(2)?,
            hat_l_t: req(3)?,
            eg_residual: req(4)?,
            nat_residual: field(5)?,
            tan_residual: field(6)?,
            gap: field(7)?,
            dist_to_solution: field(8)?,
            backtrack_failures: int(9)? as u32,
            elapsed_seconds: req(10)?,
        });
    }
    Ok(out)
}
