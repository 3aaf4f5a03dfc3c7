//! Dense matrix files and atomic writes.
//!
//! Matrices are header-free delimited text, one row per line. Comma is the
//! default delimiter; `.tsv` files and files containing tabs are read as
//! tab-separated.

use std::io::Write;
use std::path::Path;

use crate::diagnostics::fmt_f64;
use crate::error::{Error, Result};
use crate::matrix::DenseSym;

/// Largest `|a_ij - a_ji|` accepted (and averaged away) when reading.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so a failed write leaves no partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn parse_matrix(text: &str, delimiter: char) -> std::result::Result<DenseSym, String> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, line)| {
            line.split(delimiter)
                .map(|cell| {
                    cell.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("line {}: cannot parse {:?}", k + 1, cell.trim()))
                })
                .collect()
        })
        .collect::<std::result::Result<_, _>>()?;
    DenseSym::from_rows_symmetrized(&rows, SYMMETRY_TOL).map_err(|e| e.to_string())
}

pub fn read_matrix(path: &Path) -> Result<DenseSym> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_tsv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsv")) || text.contains('\t');
    parse_matrix(&text, if is_tsv { '\t' } else { ',' }).map_err(|msg| Error::Parse {
        path: path.to_path_buf(),
        msg,
    })
}

pub fn matrix_to_csv(m: &DenseSym) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: &Path, m: &DenseSym) -> Result<()> {
    write_atomic(path, matrix_to_csv(m).as_bytes())
}
