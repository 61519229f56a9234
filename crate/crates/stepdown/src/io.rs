//! Text file formats.
//!
//! * Dense symmetric matrix: first line holds the dimension `m`, followed by
//!   `m` lines of `m` whitespace-delimited reals.
//! * Vector: whitespace/newline separated reals.
//! * Critical sequence: one positive real per line, non-increasing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::mrd::CriticalSequence;

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parses the dense matrix format from already-loaded text.
pub fn parse_sym_matrix(text: &str, path: &Path) -> Result<SymMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (lno, first) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let dim: usize = first
        .trim()
        .parse()
        .map_err(|_| parse_err(path, lno + 1, format!("expected dimension, got {first:?}")))?;
    if dim == 0 {
        return Err(parse_err(path, lno + 1, "dimension must be at least 1"));
    }
    let mut data = Vec::with_capacity(dim * dim);
    let mut rows = 0;
    for (lno, line) in lines {
        let mut count = 0;
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, lno + 1, format!("invalid number {tok:?}")))?;
            data.push(v);
            count += 1;
        }
        if count != dim {
            return Err(parse_err(
                path,
                lno + 1,
                format!("expected {dim} entries in row, found {count}"),
            ));
        }
        rows += 1;
        if rows == dim {
            break;
        }
    }
    if rows != dim {
        return Err(parse_err(
            path,
            0,
            format!("expected {dim} rows, found {rows}"),
        ));
    }
    SymMatrix::new(dim, data).map_err(|e| parse_err(path, 0, e.to_string()))
}

/// Reads a dense symmetric matrix file.
pub fn read_sym_matrix(path: &Path) -> Result<SymMatrix> {
    parse_sym_matrix(&read_to_string(path)?, path)
}

/// Serializes a matrix in the dense text format.
pub fn format_sym_matrix(m: &SymMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", m.dim());
    for i in 0..m.dim() {
        let row = m.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Writes a matrix file in the dense text format.
pub fn write_sym_matrix(path: &Path, m: &SymMatrix) -> Result<()> {
    fs::write(path, format_sym_matrix(m)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a plain vector of reals (whitespace or newline separated).
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, lno + 1, format!("invalid number {tok:?}")))?;
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(parse_err(path, 1, "no values found"));
    }
    Ok(out)
}

/// Reads a critical sequence file: one positive real per line, non-increasing.
pub fn read_critical_sequence(path: &Path) -> Result<CriticalSequence> {
    let text = read_to_string(path)?;
    let mut values = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| parse_err(path, lno + 1, format!("invalid number {t:?}")))?;
        values.push(v);
    }
    CriticalSequence::new(values).map_err(|e| parse_err(path, 0, e.to_string()))
}
