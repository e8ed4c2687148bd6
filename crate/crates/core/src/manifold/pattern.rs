use std::fmt;

use crate::error::{invalid, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Sign constraint of a single column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnSign {
    Nonnegative,
    Nonpositive,
    Free,
}

/// Column sign constraints: columns in `positive` must be entrywise
/// nonnegative, columns in `negative` entrywise nonpositive, the rest free.
///
/// Column indices are 0-based. The display form is 1-based, e.g. `P{1}N{2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignPattern {
    r: usize,
    positive: Vec<usize>,
    negative: Vec<usize>,
}

impl SignPattern {
    pub fn new(r: usize, positive: &[usize], negative: &[usize]) -> Result<Self> {
        if r == 0 {
            return invalid("sign pattern needs at least one column");
        }
        let mut pos = positive.to_vec();
        let mut neg = negative.to_vec();
        pos.sort_unstable();
        neg.sort_unstable();
        pos.dedup();
        neg.dedup();
        if let Some(&j) = pos.iter().chain(&neg).find(|&&j| j >= r) {
            return invalid(format!("column index {j} out of range for r = {r}"));
        }
        if let Some(j) = pos.iter().find(|j| neg.binary_search(j).is_ok()) {
            return invalid(format!("column {j} is both nonnegative and nonpositive"));
        }
        Ok(Self { r, positive: pos, negative: neg })
    }

    /// Every column nonnegative.
    pub fn nonnegative(r: usize) -> Self {
        Self { r, positive: (0..r).collect(), negative: Vec::new() }
    }

    /// No sign constraints at all.
    pub fn free(r: usize) -> Self {
        Self { r, positive: Vec::new(), negative: Vec::new() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn positive(&self) -> &[usize] {
        &self.positive
    }

    pub fn negative(&self) -> &[usize] {
        &self.negative
    }

    /// Number of sign-constrained columns.
    pub fn r1(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_all_nonnegative(&self) -> bool {
        self.positive.len() == self.r
    }

    pub fn is_free(&self) -> bool {
        self.r1() == 0
    }

    pub fn column(&self, j: usize) -> ColumnSign {
        if self.positive.binary_search(&j).is_ok() {
            ColumnSign::Nonnegative
        } else if self.negative.binary_search(&j).is_ok() {
            ColumnSign::Nonpositive
        } else {
            ColumnSign::Free
        }
    }

    pub(crate) fn sign_of<T: Scalar>(&self, j: usize) -> T {
        match self.column(j) {
            ColumnSign::Nonnegative => T::one(),
            ColumnSign::Nonpositive => -T::one(),
            ColumnSign::Free => T::zero(),
        }
    }

    /// The `n x r` matrix `S` with entries `1`, `−1`, `0` per column.
    pub fn matrix<T: Scalar>(&self, n: usize) -> DenseMatrix<T> {
        DenseMatrix::from_fn(n, self.r, |_, j| self.sign_of(j))
    }

    pub(crate) fn check_shape<T: Scalar>(&self, x: &DenseMatrix<T>) -> Result<()> {
        if x.cols() != self.r {
            return invalid(format!(
                "matrix has {} columns but the sign pattern has {}",
                x.cols(),
                self.r
            ));
        }
        Ok(())
    }

    /// Whether `x` respects the sign constraints exactly.
    pub fn admits<T: Scalar>(&self, x: &DenseMatrix<T>) -> bool {
        self.check_shape(x).is_ok()
            && self.positive.iter().all(|&j| x.column(j).iter().all(|&v| v >= T::zero()))
            && self.negative.iter().all(|&j| x.column(j).iter().all(|&v| v <= T::zero()))
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "P{{{}}}N{{{}}}", list(&self.positive), list(&self.negative))
    }
}

/// `(S∘X)_−`: the amount by which each entry violates its column's sign.
/// Free columns are zero in the result.
pub fn negative_part<T: Scalar>(x: &DenseMatrix<T>, pattern: &SignPattern) -> Result<DenseMatrix<T>> {
    pattern.check_shape(x)?;
    Ok(DenseMatrix::from_fn(x.rows(), x.cols(), |i, j| {
        let s: T = pattern.sign_of(j);
        (-(s * x.get(i, j))).max(T::zero())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlap_and_range() {
        assert!(SignPattern::new(2, &[0], &[0]).is_err());
        assert!(SignPattern::new(2, &[2], &[]).is_err());
        assert!(SignPattern::new(0, &[], &[]).is_err());
    }

    #[test]
    fn sign_matrix_and_display() {
        let s = SignPattern::new(3, &[0], &[2]).unwrap();
        let m: DenseMatrix<f64> = s.matrix(2);
        assert_eq!(m.row(1), vec![1.0, 0.0, -1.0]);
        assert_eq!(s.to_string(), "P{1}N{3}");
        assert_eq!(SignPattern::free(2).to_string(), "P{}N{}");
        assert_eq!(s.r1(), 2);
    }

    #[test]
    fn negative_part_of_nonnegative_is_zero() {
        let x = DenseMatrix::from_rows(&[[0.5, 0.1], [0.0, 2.0]]).unwrap();
        let z = negative_part(&x, &SignPattern::nonnegative(2)).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn negative_part_flags_single_entry() {
        let x = DenseMatrix::from_rows(&[[0.5, 0.1], [-0.3, 2.0]]).unwrap();
        let z = negative_part(&x, &SignPattern::nonnegative(2)).unwrap();
        assert_eq!(z.get(1, 0), 0.3);
        assert_eq!(z.frobenius_norm(), 0.3);
    }

    #[test]
    fn negative_part_respects_nonpositive_and_free() {
        let x = DenseMatrix::from_rows(&[[-1.0, 0.4, -7.0]]).unwrap();
        let s = SignPattern::new(3, &[], &[1]).unwrap();
        let z = negative_part(&x, &s).unwrap();
        assert_eq!(z.row(0), vec![0.0, 0.4, 0.0]);
        assert!(!s.admits(&x));
        assert!(s.admits(&x.map(|v: f64| -v.abs())));
    }
}
