//! Small helpers for the headed numeric CSV files used throughout the crate.

use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};

/// Parses a headed numeric CSV with `#` comment lines, checking the header
/// against `columns`. Errors carry the 1-based source line.
pub(crate) fn read_table<R: Read>(source: R, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let header_line = reader.position().line();
    let header = reader.headers().map_err(|e| csv_error(e, header_line))?.clone();
    let found: Vec<&str> = header.iter().collect();
    if found != columns {
        return Err(Error::Parse {
            line: header_line.max(1),
            msg: format!("expected header `{}`, found `{}`", columns.join(","), found.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != columns.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", columns.len(), record.len()),
            });
        }
        let values = record
            .iter()
            .zip(columns)
            .map(|(field, column)| {
                if field.is_empty() {
                    return Err(Error::validation(format!(
                        "line {line}: empty value in column `{column}`"
                    )));
                }
                field.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("`{field}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    Ok(rows)
}

fn csv_error(err: csv::Error, fallback_line: u64) -> Error {
    let line = err.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        msg: err.to_string(),
    }
}

/// `key=value` pairs found on `#` comment lines, in file order.
pub(crate) fn metadata(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

pub(crate) fn metadata_value(meta: &[(String, String)], key: &str) -> Option<String> {
    meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

pub(crate) fn metadata_f64(meta: &[(String, String)], key: &str) -> Result<Option<f64>> {
    metadata_value(meta, key)
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Error::validation(format!("metadata `{key}={v}` is not a number")))
        })
        .transpose()
}

/// Writes `header` followed by one CSV row per entry of `rows`. Values use
/// Rust's shortest round-trip float formatting so files reload bit-exactly.
pub(crate) fn write_rows(out: &mut String, header: &str, rows: impl IntoIterator<Item = Vec<f64>>) {
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{}", v + 0.0);
        }
        out.push('\n');
    }
}
