use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;
use spectra_core::BoundReport;

use crate::failure::Failure;

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Config(format!("out: cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Config(format!("out: cannot write to stdout: {e}"))),
    }
}

pub fn json(value: &Value) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Solver(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Shortest round-trip form, with an exponent for very large or small magnitudes.
pub fn number(x: f64) -> String {
    Value::from(x).to_string()
}

pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Solver(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Solver(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Solver(format!("csv: {e}")))
}

/// Sweep parameter of a report (`j`, `eps` or `k`), else its position.
fn report_param(r: &BoundReport, index: usize) -> String {
    ["j", "eps", "k"].iter().find_map(|key| r.params.get(*key).map(Value::to_string)).unwrap_or_else(|| index.to_string())
}

pub fn bounds_csv(reports: &[BoundReport]) -> Result<String, Failure> {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| vec![report_param(r, i), number(r.lhs), number(r.rhs), number(r.margin), r.satisfied.to_string()])
        .collect();
    csv_text(&["param", "lhs", "rhs", "margin", "satisfied"], &rows)
}
