//! Complex matrix text: one line per row, comma-separated `re±imi` entries.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::number::format_float;
use super::{read_to_string, write_string, IoError};

fn format_entry(z: Complex64) -> String {
    let im = format_float(z.im);
    let sign = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sign}{im}i", format_float(z.re))
}

fn parse_entry(cell: &str) -> Option<Complex64> {
    let body = cell.trim().strip_suffix('i')?;
    let bytes = body.as_bytes();
    // the imaginary part starts at the last sign not opening the number or an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse().ok()?;
    let im = body[split..].parse().ok()?;
    Some(Complex64::new(re, im))
}

pub fn unitary_to_text(u: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    for i in 0..u.nrows() {
        let row: Vec<String> = (0..u.ncols()).map(|j| format_entry(u[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a square matrix written by [`unitary_to_text`].
pub fn unitary_from_text(text: &str, label: &str) -> Result<DMatrix<Complex64>, IoError> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                parse_entry(cell).ok_or_else(|| {
                    IoError::schema(label, lineno + 1, format!("bad complex entry `{}`", cell.trim()))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(IoError::schema(
            label,
            i + 1,
            format!("matrix is not square: row has {} entries, {n} rows", rows[i].len()),
        ));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn write_unitary(path: &Path, u: &DMatrix<Complex64>) -> Result<(), IoError> {
    write_string(path, &unitary_to_text(u))
}

pub fn read_unitary(path: &Path) -> Result<DMatrix<Complex64>, IoError> {
    unitary_from_text(&read_to_string(path)?, &path.display().to_string())
}
