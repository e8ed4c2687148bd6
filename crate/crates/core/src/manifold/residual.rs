use super::pattern::{negative_part, SignPattern};
use crate::error::{invalid, Result};
use crate::linalg::{sigma_gap, DenseMatrix};
use crate::scalar::Scalar;

/// Feasibility residuals of a matrix with respect to a sign pattern.
///
/// `sign_violation` and `orth_violation` use the entry-wise `ℓ_p` norm;
/// `sigma_gap` is always the Euclidean norm of `σ(X) − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualValue<T> {
    pub sign_violation: T,
    pub orth_violation: T,
    pub sigma_gap: T,
    pub p: T,
    pub q1: T,
    pub q2: T,
}

impl<T: Scalar> ResidualValue<T> {
    /// `sign_violation^q1 + orth_violation^q2`.
    pub fn combined(&self) -> T {
        self.sign_violation.powf(self.q1) + self.orth_violation.powf(self.q2)
    }

    /// Same as [`combined`](Self::combined) with the Gram term replaced by
    /// the singular value gap.
    pub fn combined_sigma(&self) -> T {
        self.sign_violation.powf(self.q1) + self.sigma_gap.powf(self.q2)
    }
}

pub(crate) fn check_exponents<T: Scalar>(p: T, q1: T, q2: T) -> Result<()> {
    if !p.is_finite() || p < T::one() {
        return invalid(format!("norm order p must be finite and >= 1, got {p}"));
    }
    if !(q1 > T::zero() && q2 > T::zero()) || !q1.is_finite() || !q2.is_finite() {
        return invalid(format!("exponents must be positive, got q1 = {q1}, q2 = {q2}"));
    }
    Ok(())
}

pub fn residual<T: Scalar>(
    x: &DenseMatrix<T>,
    pattern: &SignPattern,
    p: T,
    q1: T,
    q2: T,
) -> Result<ResidualValue<T>> {
    check_exponents(p, q1, q2)?;
    let neg = negative_part(x, pattern)?;
    Ok(ResidualValue {
        sign_violation: neg.entrywise_norm(p),
        orth_violation: x.gram_residual().entrywise_norm(p),
        sigma_gap: sigma_gap(x)?,
        p,
        q1,
        q2,
    })
}

/// Frobenius residuals `(‖(S∘X)_−‖_F, ‖XᵀX − I‖_F, ‖σ(X) − 1‖₂)`.
pub fn frobenius_residual<T: Scalar>(x: &DenseMatrix<T>, pattern: &SignPattern) -> Result<ResidualValue<T>> {
    residual(x, pattern, T::lit(2.0), T::one(), T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_point_has_zero_residual() {
        let x = DenseMatrix::<f64>::identity(4, 2);
        let res = frobenius_residual(&x, &SignPattern::nonnegative(2)).unwrap();
        assert_eq!((res.sign_violation, res.orth_violation), (0.0, 0.0));
        assert!(res.sigma_gap < 1e-15);
        assert_eq!(res.combined(), 0.0);
    }

    #[test]
    fn scaled_embedding() {
        let x = DenseMatrix::<f64>::identity(4, 2).scale(2.0);
        let res = frobenius_residual(&x, &SignPattern::free(2)).unwrap();
        assert!((res.orth_violation - 3.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_exponents() {
        let x = DenseMatrix::<f64>::identity(2, 1);
        let s = SignPattern::free(1);
        assert!(residual(&x, &s, 0.5, 1.0, 1.0).is_err());
        assert!(residual(&x, &s, f64::INFINITY, 1.0, 1.0).is_err());
        assert!(residual(&x, &s, 2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn l1_norms_sum_entries() {
        let x = DenseMatrix::from_rows(&[[-1.0, 0.0], [0.0, -2.0], [0.0, 0.0]]).unwrap();
        let res = residual(&x, &SignPattern::nonnegative(2), 1.0, 0.5, 0.5).unwrap();
        assert_eq!(res.sign_violation, 3.0);
        // XᵀX − I = diag(0, 3)
        assert_eq!(res.orth_violation, 3.0);
        assert!((res.combined() - 2.0 * 3f64.sqrt()).abs() < 1e-15);
    }
}
