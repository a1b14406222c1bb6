//! CSV form of a [`SweepResult`].
//!
//! Header: `axis,axis_value,mc_mean,mc_stderr,ci95_low,ci95_high,deq_value,deq_perfect,extra`.
//! Floats use 17 significant digits (`{:.16e}`), absent cells are `NaN`, and
//! the `extra` cell is quoted when it contains a comma or quote. Run metadata
//! (wall time, specs) is not part of the CSV so identical inputs give
//! identical bytes.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::sweep::{Axis, SweepResult, SweepRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "axis",
    "axis_value",
    "mc_mean",
    "mc_stderr",
    "ci95_low",
    "ci95_high",
    "deq_value",
    "deq_perfect",
    "extra",
];

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => "NaN".to_string(),
    }
}

fn parse_cell(s: &str, line: usize) -> Result<Option<f64>> {
    if s == "NaN" {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|e| Error::Parse {
        context: format!("csv line {line}"),
        message: format!("bad number '{s}': {e}"),
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse { context: "csv".into(), message: e.to_string() }
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let axis = result.axis.as_str();
    for r in &result.rows {
        w.write_record([
            axis.to_string(),
            format!("{:.16e}", r.axis_value),
            cell(r.mc_mean),
            cell(r.mc_stderr),
            cell(r.ci95_low),
            cell(r.ci95_high),
            cell(r.deq_value),
            cell(r.deq_perfect),
            r.extra.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse { context: "csv".into(), message: e.to_string() })?;
    Ok(())
}

/// Writes `result` to `path`.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io)?;
    let mut buf = BufWriter::new(file);
    write_csv(result, &mut buf).map_err(|e| match e {
        Error::Parse { message, .. } => io(std::io::Error::other(message)),
        other => other,
    })?;
    buf.flush().map_err(io)?;
    Ok(())
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Reads rows back. Metadata is not stored in the CSV and comes back empty;
/// a header-only file yields no rows and the `M` axis.
pub fn parse_csv<R: Read>(input: R) -> Result<SweepResult> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse {
            context: "csv header".into(),
            message: format!("expected {CSV_HEADER:?}, got {header:?}"),
        });
    }
    let mut axis: Option<Axis> = None;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                context: format!("csv line {line}"),
                message: format!("expected {} fields, got {}", CSV_HEADER.len(), rec.len()),
            });
        }
        let a: Axis = rec[0].parse()?;
        if axis.is_some_and(|prev| prev != a) {
            return Err(Error::Parse {
                context: format!("csv line {line}"),
                message: "mixed axes in one file".into(),
            });
        }
        axis = Some(a);
        let axis_value = parse_cell(&rec[1], line)?.ok_or_else(|| Error::Parse {
            context: format!("csv line {line}"),
            message: "axis_value is NaN".into(),
        })?;
        rows.push(SweepRow {
            axis_value,
            mc_mean: parse_cell(&rec[2], line)?,
            mc_stderr: parse_cell(&rec[3], line)?,
            ci95_low: parse_cell(&rec[4], line)?,
            ci95_high: parse_cell(&rec[5], line)?,
            deq_value: parse_cell(&rec[6], line)?,
            deq_perfect: parse_cell(&rec[7], line)?,
            extra: rec[8].to_string(),
        });
    }
    let mut result = SweepResult::new(axis.unwrap_or(Axis::M));
    result.rows = rows;
    Ok(result)
}
