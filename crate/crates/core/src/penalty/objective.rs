use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::linalg::{spectral_norm, DenseMatrix};
use crate::oracle::{exact_project_nonneg_stiefel, EnumerationBudget};
use crate::scalar::Scalar;

pub type ObjectiveFn<T> = Arc<dyn Fn(&DenseMatrix<T>) -> T + Send + Sync>;

/// A user-supplied objective: value function and its Lipschitz constant.
#[derive(Clone)]
pub struct CustomObjective<T: Scalar> {
    pub name: String,
    pub value: ObjectiveFn<T>,
    pub lipschitz: T,
}

impl<T: Scalar> fmt::Debug for CustomObjective<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomObjective")
            .field("name", &self.name)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

/// The objective `F` of a penalised problem.
#[derive(Debug, Clone)]
pub enum ObjectiveSpec<T: Scalar> {
    /// `⟨C, X⟩`.
    Linear { c: DenseMatrix<T> },
    /// `−tr(XᵀAᵀAX) + λ‖W∘X‖_{ℓ1}`; `weights` is `n x r` (all ones gives
    /// the plain `ℓ1` term).
    SparseTrace { a: DenseMatrix<T>, lambda: T, weights: DenseMatrix<T> },
    /// `−dist(X, St^{n,r}_+)`, evaluated by exact enumeration.
    NegDistOracle { budget: EnumerationBudget },
    Custom(CustomObjective<T>),
}

impl<T: Scalar> ObjectiveSpec<T> {
    pub fn sparse_trace(a: DenseMatrix<T>, lambda: T, r: usize) -> Self {
        let weights = DenseMatrix::from_fn(a.cols(), r, |_, _| T::one());
        ObjectiveSpec::SparseTrace { a, lambda, weights }
    }

    pub fn value(&self, x: &DenseMatrix<T>) -> Result<T> {
        match self {
            ObjectiveSpec::Linear { c } => Ok(c.inner(x)),
            ObjectiveSpec::SparseTrace { a, lambda, weights } => {
                let ax = a.matmul(x);
                let l1: T = weights.hadamard(x).entrywise_norm(T::one());
                Ok(-ax.inner(&ax) + *lambda * l1)
            }
            ObjectiveSpec::NegDistOracle { budget } => Ok(-exact_project_nonneg_stiefel(x, *budget)?.1),
            ObjectiveSpec::Custom(c) => Ok((c.value)(x)),
        }
    }

    /// Lipschitz constant of `F` with respect to the Frobenius norm.
    /// For the sparse trace objective this is the constant over the Stiefel
    /// manifold, `2‖A‖₂² + rλ√n`.
    pub fn lipschitz_estimate(&self, n: usize, r: usize) -> Result<T> {
        Ok(match self {
            ObjectiveSpec::Linear { c } => c.frobenius_norm(),
            ObjectiveSpec::SparseTrace { a, lambda, .. } => {
                let s = spectral_norm(a)?;
                T::lit(2.0) * s * s + T::lit(r as f64) * *lambda * T::lit((n as f64).sqrt())
            }
            ObjectiveSpec::NegDistOracle { .. } => T::one(),
            ObjectiveSpec::Custom(c) => c.lipschitz,
        })
    }

    /// Lipschitz constant of the gradient of the smooth part, where there
    /// is one.
    pub fn smooth_lipschitz(&self) -> Result<Option<T>> {
        Ok(match self {
            ObjectiveSpec::Linear { .. } => Some(T::zero()),
            ObjectiveSpec::SparseTrace { a, .. } => {
                let s = spectral_norm(a)?;
                Some(T::lit(2.0) * s * s)
            }
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample_c() -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&[[-2.0, 0.0], [0.0, -2.0], [-1.0, -1.0]]).unwrap()
    }

    #[test]
    fn linear_values_at_the_two_points() {
        let f = ObjectiveSpec::Linear { c: counterexample_c() };
        let xs = DenseMatrix::identity(3, 2);
        assert_eq!(f.value(&xs).unwrap(), -4.0);
        let s5 = 5f64.sqrt();
        let xh = DenseMatrix::from_rows(&[[2.0 / s5, 0.0], [0.0, 1.0], [1.0 / s5, 0.0]]).unwrap();
        assert!((f.value(&xh).unwrap() - (-s5 - 2.0)).abs() < 1e-15);
        assert_eq!(f.lipschitz_estimate(3, 2).unwrap(), 10f64.sqrt());
    }

    #[test]
    fn sparse_trace_lipschitz_constant() {
        let a = DenseMatrix::<f64>::from_diagonal(&[2.0, 1.0, 0.5, 0.0]);
        let f = ObjectiveSpec::sparse_trace(a, 0.5, 2);
        // 2·4 + 2·0.5·2
        assert!((f.lipschitz_estimate(4, 2).unwrap() - 10.0).abs() < 1e-14);
        assert_eq!(f.smooth_lipschitz().unwrap(), Some(8.0));
        let x = DenseMatrix::identity(4, 2);
        // −(4 + 1) + 0.5·2
        assert!((f.value(&x).unwrap() + 4.0).abs() < 1e-15);
    }
}
