//! Minimal CSV reading and writing. Floats use 17 significant digits so
//! every `f64` survives a round trip.

use std::fmt::Write as _;
use std::path::Path;

use wavessm_core::Matrix;

use crate::{CliError, Result};

/// `{:.16e}`: one leading digit plus sixteen decimals.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header plus rows, rendered with `\n` line endings.
pub fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    std::fs::write(path, render(header, rows)).map_err(|e| CliError::io(path, e))
}

/// Matrix with a `c0,c1,…` header.
pub fn render_matrix(m: &Matrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 24 + 16);
    for j in 0..m.cols() {
        if j > 0 {
            out.push(',');
        }
        let _ = write!(out, "c{j}");
    }
    out.push('\n');
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`render_matrix`]. `path` is only used in error messages.
pub fn parse_matrix(text: &str, path: &Path) -> Result<Matrix> {
    let bad = |message: String| CliError::Csv { path: path.to_path_buf(), message };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let cols = if header.is_empty() { 0 } else { header.split(',').count() };
    let mut data = Vec::new();
    let mut rows = 0;
    for (k, line) in lines.enumerate() {
        let before = data.len();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| bad(format!("line {}: bad number `{field}`", k + 2)))?;
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(bad(format!("line {}: expected {cols} fields, found {}", k + 2, data.len() - before)));
        }
        rows += 1;
    }
    Ok(Matrix::from_vec(rows, cols, data)?)
}

/// Comma-separated list flag, e.g. `16,32,64`.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}
