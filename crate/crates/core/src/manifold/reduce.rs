use super::pattern::SignPattern;
use super::rounding::nearest_nonneg_stiefel_upper;
use crate::error::{invalid, Result};
use crate::linalg::{orth_complement_basis, polar_factor, DenseMatrix};
use crate::scalar::Scalar;

/// `Y = X D Π`: nonpositive columns flipped, then columns reordered as
/// nonnegative, flipped, free.
#[derive(Debug, Clone)]
pub struct SignReduction<T: Scalar> {
    pub y: DenseMatrix<T>,
    /// `order[k]` is the column of `X` that became column `k` of `Y`.
    pub order: Vec<usize>,
    /// Diagonal of `D`, indexed by the columns of `X`.
    pub signs: Vec<T>,
    /// Number of constrained columns; they come first in `Y`.
    pub r1: usize,
}

impl<T: Scalar> SignReduction<T> {
    /// Maps a matrix in the reduced coordinates back: `Ȳ Πᵀ D`.
    pub fn restore(&self, y: &DenseMatrix<T>) -> DenseMatrix<T> {
        let mut cols = vec![Vec::new(); self.order.len()];
        for (k, &j) in self.order.iter().enumerate() {
            cols[j] = y.column(k).iter().map(|&v| v * self.signs[j]).collect();
        }
        DenseMatrix::from_columns(&cols).expect("restore keeps the shape")
    }
}

pub fn sign_reduce<T: Scalar>(x: &DenseMatrix<T>, pattern: &SignPattern) -> Result<SignReduction<T>> {
    pattern.check_shape(x)?;
    let r = pattern.r();
    let order: Vec<usize> = pattern
        .positive()
        .iter()
        .chain(pattern.negative())
        .copied()
        .chain((0..r).filter(|&j| pattern.column(j) == super::ColumnSign::Free))
        .collect();
    let signs: Vec<T> = (0..r)
        .map(|j| if pattern.sign_of::<T>(j) < T::zero() { -T::one() } else { T::one() })
        .collect();
    let cols: Vec<Vec<T>> = order
        .iter()
        .map(|&j| x.column(j).iter().map(|&v| v * signs[j]).collect())
        .collect();
    Ok(SignReduction {
        y: DenseMatrix::from_columns(&cols)?,
        order,
        signs,
        r1: pattern.r1(),
    })
}

/// Feasible point of `St^{n,r}_S` near `X` and its distance `‖X − X̄‖_F`.
///
/// The constrained block is handled by [`nearest_nonneg_stiefel_upper`]
/// after sign reduction. The free block is projected off the range of that
/// result and then replaced by the nearest orthonormal matrix inside the
/// orthogonal complement.
pub fn nearest_sign_stiefel_upper<T: Scalar>(
    x: &DenseMatrix<T>,
    pattern: &SignPattern,
) -> Result<(DenseMatrix<T>, T)> {
    let (n, r) = x.shape();
    if r > n {
        return invalid(format!("need cols <= rows, got {n}x{r}"));
    }
    pattern.check_shape(x)?;
    if pattern.is_free() {
        let u = polar_factor(x)?;
        let d = (x - &u).frobenius_norm();
        return Ok((u, d));
    }

    let red = sign_reduce(x, pattern)?;
    let r1 = red.r1;
    let ybar = if r1 == r {
        nearest_nonneg_stiefel_upper(&red.y)?.0
    } else {
        let (y1, _) = nearest_nonneg_stiefel_upper(&red.y.columns(0..r1))?;
        let y2 = red.y.columns(r1..r);
        let y2p = &y2 - &y1.matmul(&y1.tr_matmul(&y2));
        let v = orth_complement_basis(&y1)?;
        let z = v.matmul(&polar_factor(&v.tr_matmul(&y2p))?);
        y1.hstack(&z)
    };
    let xbar = red.restore(&ybar);
    let d = (x - &xbar).frobenius_norm();
    Ok((xbar, d))
}
