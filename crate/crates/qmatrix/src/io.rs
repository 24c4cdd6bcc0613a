//! Matrix files. CSV is row-major with an optional header line; JSON is an
//! array of rows or a flat array (one row).

use crate::error::{CliError, Result};
use qmatrix_core::ClassicalMatrix;
use std::path::Path;

pub fn read_matrix(path: &Path) -> Result<ClassicalMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let rows = if is_json {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
    .map_err(|msg| CliError::Parse {
        path: path.to_path_buf(),
        msg,
    })?;
    to_matrix(rows).map_err(|msg| CliError::Parse {
        path: path.to_path_buf(),
        msg,
    })
}

/// Reads a file that must hold a single row.
pub fn read_array(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.rows() != 1 {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            msg: format!("expected a single row, found {} rows", m.rows()),
        });
    }
    Ok(m.row(0).to_vec())
}

pub fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let first = record.get(0).unwrap_or("");
        if n == 0 && first.parse::<f64>().is_err() {
            continue;
        }
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| format!("line {}: `{s}` is not a number", n + 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_json(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let outer = value.as_array().ok_or("expected a JSON array")?;
    if outer.iter().all(|v| v.is_number()) {
        let row = outer.iter().map(|v| v.as_f64().unwrap()).collect();
        return Ok(vec![row]);
    }
    serde_json::from_value(value).map_err(|e| e.to_string())
}

fn to_matrix(rows: Vec<Vec<f64>>) -> Result<ClassicalMatrix, String> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err("no data".into());
    }
    if let Some(i) = rows.iter().position(|r| r.len() != rows[0].len()) {
        return Err(format!("row {i} has {} entries, row 0 has {}", rows[i].len(), rows[0].len()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err("non-finite value".into());
    }
    for (what, n) in [("row count", rows.len()), ("column count", rows[0].len())] {
        if !n.is_power_of_two() {
            return Err(format!("{what} {n} is not a power of two"));
        }
    }
    ClassicalMatrix::from_rows(&rows).map_err(|e| e.to_string())
}
