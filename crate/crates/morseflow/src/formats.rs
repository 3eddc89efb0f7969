//! Plain-text output formats: CSV with 17 significant digits, pretty JSON
//! and Graphviz DOT.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

/// Scientific notation with 17 significant digits, enough to round-trip
/// any `f64`.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Input(format!("{}: {other:?}", path.display())),
    }
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    write_records(path, header, rows.into_iter().map(|r| r.into_iter().map(real).collect()))
}

/// Writes pre-formatted records under `header`.
pub fn write_records<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a two-column numeric CSV. A first row that does not parse as
/// numbers is taken as a header.
pub fn read_xy_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let (mut xs, mut us) = (Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != 2 {
            return Err(CliError::Input(format!(
                "{}: row {} has {} columns, expected 2",
                path.display(),
                line + 1,
                rec.len()
            )));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(u)) => {
                xs.push(x);
                us.push(u);
            }
            _ if line == 0 => {}
            _ => {
                return Err(CliError::Input(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    line + 1
                )))
            }
        }
    }
    Ok((xs, us))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// A directed graph in DOT syntax. Edge labels are optional.
pub fn dot(name: &str, nodes: &[String], edges: &[(String, String, Option<String>)]) -> String {
    let mut s = format!("digraph \"{name}\" {{\n");
    for n in nodes {
        s.push_str(&format!("  \"{n}\";\n"));
    }
    for (a, b, label) in edges {
        match label {
            Some(l) => s.push_str(&format!("  \"{a}\" -> \"{b}\" [label=\"{l}\"];\n")),
            None => s.push_str(&format!("  \"{a}\" -> \"{b}\";\n")),
        }
    }
    s.push_str("}\n");
    s
}
