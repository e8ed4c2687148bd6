//! Plain-text matrix files: a `rows cols` header line followed by one line
//! of whitespace-separated decimals per row. Blank lines and lines starting
//! with `#` are ignored.

use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::linalg::DenseMatrix;

pub fn parse_matrix(text: &str) -> Result<DenseMatrix<f64>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let Some(header) = lines.next() else {
        return invalid("empty matrix file");
    };
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| crate::Error::InvalidInput(format!("bad dimension {t:?}"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return invalid(format!("header must be \"rows cols\", got {header:?}"));
    };
    if rows == 0 || cols == 0 {
        return invalid("matrix dimensions must be positive");
    }
    let mut data = Vec::with_capacity(rows);
    for (i, line) in lines.enumerate() {
        if i >= rows {
            return invalid(format!("more than {rows} rows"));
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| crate::Error::InvalidInput(format!("bad number {t:?} on row {}", i + 1))))
            .collect::<Result<_>>()?;
        if row.len() != cols {
            return invalid(format!("row {} has {} entries, expected {cols}", i + 1, row.len()));
        }
        data.push(row);
    }
    if data.len() != rows {
        return invalid(format!("expected {rows} rows, found {}", data.len()));
    }
    let m = DenseMatrix::from_rows(&data)?;
    if !m.is_finite() {
        return invalid("matrix has non-finite entries");
    }
    Ok(m)
}

/// Inverse of [`parse_matrix`]; entries use 17 significant digits so the
/// round trip is exact.
pub fn format_matrix(m: &DenseMatrix<f64>) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = DenseMatrix::from_rows(&[[0.1, -1.0 / 3.0], [1e-300, 2f64.sqrt()]]).unwrap();
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn comments_and_errors() {
        let m = parse_matrix("# nearest point\n2 1\n1\n\n-2.5\n").unwrap();
        assert_eq!(m.column(0), &[1.0, -2.5]);
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2 2\n1 2\n").is_err());
        assert!(parse_matrix("1 2\n1 x\n").is_err());
        assert!(parse_matrix("1 2 3\n1 2\n").is_err());
        assert!(parse_matrix("1 1\nNaN\n").is_err());
    }
}
