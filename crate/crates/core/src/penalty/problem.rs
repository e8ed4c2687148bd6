use super::objective::ObjectiveSpec;
use crate::error::{invalid, Result};
use crate::linalg::DenseMatrix;
use crate::manifold::{check_exponents, negative_part, SignPattern};
use crate::scalar::Scalar;

/// Membership tolerance for the Stiefel domain.
pub const STIEFEL_DOMAIN_TOL: f64 = 1e-8;

/// The set the penalised problem is posed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Stiefel,
    NonnegOrthant,
    FullSpace,
}

/// `min F(X) + μ(‖(S∘X)_−‖_{ℓp}^{q1} + ‖XᵀX − I‖_{ℓp}^{q2})` over `domain`.
#[derive(Debug, Clone)]
pub struct PenaltyProblem<T: Scalar> {
    pub objective: ObjectiveSpec<T>,
    pub mu: T,
    pub p: T,
    pub q1: T,
    pub q2: T,
    pub domain: Domain,
    pub pattern: SignPattern,
}

impl<T: Scalar> PenaltyProblem<T> {
    pub fn new(
        objective: ObjectiveSpec<T>,
        mu: T,
        p: T,
        q1: T,
        q2: T,
        domain: Domain,
        pattern: SignPattern,
    ) -> Result<Self> {
        if !(mu > T::zero()) || !mu.is_finite() {
            return invalid(format!("mu must be positive, got {mu}"));
        }
        check_exponents(p, q1, q2)?;
        Ok(Self { objective, mu, p, q1, q2, domain, pattern })
    }

    pub fn check_domain(&self, x: &DenseMatrix<T>) -> Result<()> {
        self.pattern.check_shape(x)?;
        match self.domain {
            Domain::Stiefel => {
                let e = x.gram_residual().frobenius_norm();
                if e > T::lit(STIEFEL_DOMAIN_TOL) {
                    return invalid(format!("point is off the Stiefel manifold by {e:e}"));
                }
            }
            Domain::NonnegOrthant => {
                if !x.is_nonnegative() {
                    return invalid("point has negative entries");
                }
            }
            Domain::FullSpace => {}
        }
        Ok(())
    }

    /// `‖(S∘X)_−‖^{q1} + ‖XᵀX − I‖^{q2}` in the entry-wise `ℓ_p` norm. On the
    /// Stiefel domain the Gram term vanishes identically and is dropped, so
    /// rounding noise in `XᵀX` is not amplified by a small `q2`.
    pub fn penalty_term(&self, x: &DenseMatrix<T>) -> Result<T> {
        let sign = negative_part(x, &self.pattern)?.entrywise_norm(self.p).powf(self.q1);
        let orth = match self.domain {
            Domain::Stiefel => T::zero(),
            _ => x.gram_residual().entrywise_norm(self.p).powf(self.q2),
        };
        Ok(sign + orth)
    }
}

/// `F(X) + μ·ρ(X)` after checking that `X` lies in the problem's domain.
pub fn penalty_value<T: Scalar>(x: &DenseMatrix<T>, prob: &PenaltyProblem<T>) -> Result<T> {
    prob.check_domain(x)?;
    Ok(prob.objective.value(x)? + prob.mu * prob.penalty_term(x)?)
}

/// Penalty weight above which global minimisers coincide (exponents `q ≤ 1/2`
/// on the sign term, `1/2` on the Gram term).
pub fn mu_threshold_global(lipschitz: f64, n: usize, r: usize, p: f64) -> f64 {
    let nr = (n * r) as f64;
    5.0 * lipschitz * (r as f64).powf(0.75) * nr.powf((p - 2.0) / (4.0 * p)).max(1.0)
}

/// Penalty weight above which every local minimiser of the constrained
/// problem stays a local minimiser of the penalised one.
pub fn mu_threshold_local(lipschitz_local: f64, n: usize, r: usize, p: f64, q1: f64, q2: f64) -> f64 {
    let nr = (n * r) as f64;
    let rf = r as f64;
    let m = 1f64
        .max(nr.powf(q1 * (p - 2.0) / (2.0 * p)))
        .max(rf.powf(q2 * (p - 2.0) / p));
    4.0 * lipschitz_local * rf.sqrt() * m
}
