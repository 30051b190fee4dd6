//! Laser fields tabulated in text files.
//!
//! One row per sample time: `t e` for a scalar profile, or
//! `t e₁ … e_d` for a full vector field. Columns are separated by
//! whitespace or commas; blank lines and lines starting with `#` are skipped.
//! Sample times must be equispaced.

use std::path::Path;

use laser_magnus::field::tabulated::TabulatedField;

use crate::config::FieldFileConfig;
use crate::error::{HarnessError, Result};

/// `(t, e(t))` rows of a field file.
pub fn parse_rows(text: &str, path: &Path) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| HarnessError::Format {
            path: path.to_path_buf(),
            line: n + 1,
            reason,
        };
        let numbers = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|w| !w.is_empty())
            .map(|w| w.parse::<f64>().map_err(|_| bad(format!("'{w}' is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        if numbers.len() < 2 {
            return Err(bad("a row needs a time and at least one field value".into()));
        }
        if let Some((_, first)) = rows.first() {
            if first.len() != numbers.len() - 1 {
                return Err(bad(format!("expected {} columns, found {}", first.len() + 1, numbers.len())));
            }
        }
        rows.push((numbers[0], numbers[1..].to_vec()));
    }
    Ok(rows)
}

/// Reads a field for a problem on `dims` axes.
///
/// A two-column file on more than one axis needs `direction`, along which
/// the scalar profile is applied.
pub fn load_field(config: &FieldFileConfig, dims: usize) -> Result<TabulatedField> {
    let path = &config.path;
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut rows = parse_rows(&text, path)?;
    let columns = rows.first().map_or(0, |r| r.1.len());
    if columns != dims {
        let direction = match (&config.direction, columns) {
            (Some(d), 1) if d.len() == dims => d,
            (None, 1) => {
                return Err(HarnessError::Request(format!(
                    "{}: a scalar profile on {dims} axes needs a polarization direction",
                    path.display()
                )))
            }
            _ => {
                return Err(HarnessError::Request(format!(
                    "{}: {columns} field components for a problem on {dims} axes",
                    path.display()
                )))
            }
        };
        for (_, e) in &mut rows {
            *e = direction.iter().map(|d| d * e[0]).collect();
        }
    }
    let degree = config.degree.unwrap_or(TabulatedField::DEFAULT_DEGREE);
    Ok(TabulatedField::from_rows(&rows, degree)?)
}
