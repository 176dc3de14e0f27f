//! Plain numeric CSV: one matrix row per line, comma separated, no header.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::{HarnessError, Result};

/// Shortest representation that parses back to the same `f64`.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

pub fn parse_matrix(text: &str) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row =
            line.split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|e| {
                        HarnessError::Data(format!("line {}: bad number {:?}: {e}", idx + 1, field.trim()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(HarnessError::Data(format!(
                    "line {}: expected {} columns, found {}",
                    idx + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(HarnessError::Data(format!("line {}: non-finite value", idx + 1)));
        }
        rows.push(row);
    }
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    Array2::from_shape_vec((n_rows, n_cols), rows.into_iter().flatten().collect())
        .map_err(|e| HarnessError::Data(e.to_string()))
}

pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_matrix(&text).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))
}

/// Reads a vector stored either as one row or as one column.
pub fn read_vector(path: &Path) -> Result<Array1<f64>> {
    let m = read_matrix(path)?;
    match m.dim() {
        (1, _) | (_, 1) => Ok(Array1::from_iter(m.iter().copied())),
        dim => Err(HarnessError::Data(format!(
            "{}: expected a vector, found {dim:?}",
            path.display()
        ))),
    }
}

pub fn matrix_to_csv(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let fields: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn vector_to_csv(v: &Array1<f64>) -> String {
    v.iter().map(|&x| format_value(x) + "\n").collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn roundtrip_is_exact() {
        let m = array![[0.1, -2.5e-17], [1.0 / 3.0, 7.0]];
        assert_eq!(parse_matrix(&matrix_to_csv(&m)).unwrap(), m);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = parse_matrix("1,2\n3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
