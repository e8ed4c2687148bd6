use crate::error::{invalid, Error, Result};
use crate::linalg::{thin_svd, DenseMatrix};
use crate::scalar::Scalar;

/// Gram matrices with a larger condition number are treated as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionMetrics<T> {
    /// `‖A − Â‖_F / ‖A‖_F`.
    pub rre: T,
    /// `tr(ÂᵀÂ) / tr(AᵀA)`.
    pub pev: T,
    /// Condition number of `X̂ᵀX̂`.
    pub gram_condition: T,
}

/// Relative reconstruction error and explained variance of the projection
/// `Â = A X̂ (X̂ᵀX̂)⁻¹ X̂ᵀ`.
pub fn reconstruction_metrics<T: Scalar>(a: &DenseMatrix<T>, x: &DenseMatrix<T>) -> Result<ReconstructionMetrics<T>> {
    if a.cols() != x.rows() {
        return invalid(format!("A has {} columns but X has {} rows", a.cols(), x.rows()));
    }
    let total = a.inner(a);
    if !(total > T::zero()) {
        return invalid("A must be nonzero");
    }
    let svd = thin_svd(x)?;
    let smax = svd.singular.iter().copied().fold(T::zero(), T::max);
    let smin = svd.singular.iter().copied().fold(T::infinity(), T::min);
    let cond = if smin > T::zero() { (smax / smin).powi(2) } else { T::infinity() };
    if !(cond <= T::lit(MAX_GRAM_CONDITION)) {
        return Err(Error::RankDeficient { condition: cond.to_f64_lossy() });
    }
    // the projector onto range(X) is U Uᵀ for the left singular vectors U
    let au = a.matmul(&svd.left);
    let ahat = au.matmul(&svd.left.transpose());
    let err = a - &ahat;
    Ok(ReconstructionMetrics {
        rre: (err.inner(&err) / total).sqrt(),
        pev: ahat.inner(&ahat) / total,
        gram_condition: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_subspace() {
        let a = DenseMatrix::<f64>::from_rows(&[[3.0, 0.0, 4.0], [0.0, 0.0, 0.0]]).unwrap();
        let x = DenseMatrix::from_rows(&[[1.0], [0.0], [0.0]]).unwrap();
        let m = reconstruction_metrics(&a, &x).unwrap();
        assert!((m.pev - 9.0 / 25.0).abs() < 1e-15);
        assert!((m.rre - 0.8).abs() < 1e-15);
    }

    #[test]
    fn invariant_under_column_scaling() {
        let a = DenseMatrix::<f64>::from_rows(&[[1.0, 2.0, 0.5], [0.0, 1.0, 3.0], [2.0, 2.0, 2.0]]).unwrap();
        let x = DenseMatrix::from_rows(&[[1.0, 0.2], [0.5, 1.0], [0.0, 0.3]]).unwrap();
        let m1 = reconstruction_metrics(&a, &x).unwrap();
        let m2 = reconstruction_metrics(&a, &x.zip_map(&DenseMatrix::from_rows(&[[5.0, 0.1]; 3]).unwrap(), |u, v| u * v)).unwrap();
        assert!((m1.rre - m2.rre).abs() < 1e-12);
        assert!((m1.rre * m1.rre + m1.pev - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let a = DenseMatrix::<f64>::identity(3, 3);
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(reconstruction_metrics(&a, &x), Err(Error::RankDeficient { .. })));
    }
}
