use crate::error::{invalid, Result};
use crate::linalg::{norm2, DenseMatrix};
use crate::scalar::Scalar;

/// Index of the largest entry of `row`, smallest index on ties.
fn row_argmax<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Keeps, in each row, only the row maximum at its smallest attaining
/// column. The result has at most one nonzero per row, hence a diagonal
/// Gram matrix.
pub fn rounding_matrix<T: Scalar>(x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !x.is_nonnegative() {
        return invalid("rounding_matrix needs a nonnegative matrix");
    }
    let mut y = DenseMatrix::zeros(x.rows(), x.cols());
    for i in 0..x.rows() {
        let row = x.row(i);
        let l = row_argmax(&row);
        y.set(i, l, row[l]);
    }
    Ok(y)
}

/// Feasible point of `St^{n,r}_+` near `X` and its distance `‖X − X̄‖_F`.
///
/// Takes `X₊`, rounds it and normalises each column. A column that the
/// rounding left at zero receives a coordinate vector on a row no other
/// column owns, picked by largest `(X₊)_{ij}`. If every row is owned, the
/// row is taken from a column that owns at least two.
pub fn nearest_nonneg_stiefel_upper<T: Scalar>(x: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, T)> {
    let (n, r) = x.shape();
    if r > n {
        return invalid(format!("need cols <= rows, got {n}x{r}"));
    }
    let xp = x.positive_part();
    let mut y = rounding_matrix(&xp)?;

    // owner[i] = column holding the nonzero of row i
    let mut owner: Vec<Option<usize>> = (0..n)
        .map(|i| (0..r).find(|&j| y.get(i, j) != T::zero()))
        .collect();

    for j in 0..r {
        if y.column(j).iter().any(|&v| v != T::zero()) {
            continue;
        }
        let mut support = vec![0usize; r];
        for o in owner.iter().flatten() {
            support[*o] += 1;
        }
        let free_rows: Vec<usize> = (0..n).filter(|&i| owner[i].is_none()).collect();
        let candidates = if free_rows.is_empty() {
            (0..n).filter(|&i| owner[i].is_some_and(|o| support[o] >= 2)).collect()
        } else {
            free_rows
        };
        let mut pick = candidates[0];
        for &i in &candidates[1..] {
            if xp.get(i, j) > xp.get(pick, j) {
                pick = i;
            }
        }
        if let Some(o) = owner[pick] {
            y.set(pick, o, T::zero());
        }
        y.set(pick, j, T::one());
        owner[pick] = Some(j);
    }

    for j in 0..r {
        let nrm = norm2(y.column(j));
        for i in 0..n {
            let v = y.get(i, j) / nrm;
            y.set(i, j, v);
        }
    }
    let dist = (x - &y).frobenius_norm();
    Ok((y, dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_max_selection() {
        let x = DenseMatrix::from_rows(&[[0.9, 0.1], [0.2, 0.8]]).unwrap();
        let y = rounding_matrix(&x).unwrap();
        assert_eq!(y, DenseMatrix::from_rows(&[[0.9, 0.0], [0.0, 0.8]]).unwrap());
    }

    #[test]
    fn tie_keeps_first_column() {
        let x = DenseMatrix::from_rows(&[[0.5, 0.5]]).unwrap();
        assert_eq!(rounding_matrix(&x).unwrap().row(0), vec![0.5, 0.0]);
    }

    #[test]
    fn rejects_negative_entries() {
        let x = DenseMatrix::from_rows(&[[0.5, -0.1]]).unwrap();
        assert!(rounding_matrix(&x).is_err());
    }

    #[test]
    fn feasible_input_is_fixed() {
        let s = 0.6;
        let x = DenseMatrix::from_rows(&[[s, 0.0], [0.8, 0.0], [0.0, 1.0]]).unwrap();
        let (xb, d) = nearest_nonneg_stiefel_upper(&x).unwrap();
        assert!((&xb - &x).frobenius_norm() < 1e-15);
        assert!(d < 1e-15);
    }

    #[test]
    fn diagonal_is_rescaled() {
        let x = DenseMatrix::from_diagonal(&[2.0, 0.5]);
        let (xb, d) = nearest_nonneg_stiefel_upper(&x).unwrap();
        assert_eq!(xb, DenseMatrix::identity(2, 2));
        assert!((d - 1.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_column_gets_unused_row() {
        let x = DenseMatrix::from_rows(&[[1.0, 0.2], [0.0, 0.0], [0.0, 0.1]]).unwrap();
        let (xb, _) = nearest_nonneg_stiefel_upper(&x).unwrap();
        assert_eq!(xb.column(1), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_columns_steal_rows_when_all_owned() {
        let x = DenseMatrix::from_fn(3, 3, |_, _| 1.0);
        let (xb, _) = nearest_nonneg_stiefel_upper(&x).unwrap();
        assert!((&xb.gram() - &DenseMatrix::identity(3, 3)).frobenius_norm() < 1e-15);
        assert!(xb.is_nonnegative());
    }

    #[test]
    fn all_negative_input_is_still_feasible() {
        let x = DenseMatrix::from_fn(4, 2, |i, j| -((i + j) as f64) - 1.0);
        let (xb, d) = nearest_nonneg_stiefel_upper(&x).unwrap();
        assert!((&xb.gram() - &DenseMatrix::identity(2, 2)).frobenius_norm() < 1e-15);
        assert!(xb.is_nonnegative());
        assert!((d - (&x - &xb).frobenius_norm()).abs() < 1e-15);
    }
}
