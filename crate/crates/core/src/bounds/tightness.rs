use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::linalg::{sigma_gap, DenseMatrix};
use crate::manifold::{frobenius_residual, SignPattern};
use crate::oracle::{exact_project_nonneg_stiefel, EnumerationBudget};
use crate::scalar::Scalar;

/// Families of matrices that approach the feasible set while the distance
/// stays large relative to the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TightnessKind {
    /// Orthonormal, with a small negative entry.
    P5i,
    /// Nonnegative, with a small Gram defect.
    P5ii,
    /// Neither nonnegative nor orthonormal.
    P5iii,
    /// `√k [I_r; 0]`.
    Divergence,
}

impl TightnessKind {
    pub fn name(self) -> &'static str {
        match self {
            TightnessKind::P5i => "P5i",
            TightnessKind::P5ii => "P5ii",
            TightnessKind::P5iii => "P5iii",
            TightnessKind::Divergence => "divergence",
        }
    }
}

impl fmt::Display for TightnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TightnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [TightnessKind::P5i, TightnessKind::P5ii, TightnessKind::P5iii, TightnessKind::Divergence]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown sequence kind {s:?}")))
    }
}

/// A parametrised sequence. For the `P5*` kinds `epsilons` holds values in
/// `(0, 1/2)`; for `Divergence` it holds the scale factors `k ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TightnessSequence {
    pub kind: TightnessKind,
    pub n: usize,
    pub r: usize,
    pub epsilons: Vec<f64>,
}

impl TightnessSequence {
    /// `ε_k = start · 2^{−k}` for `k = 0..steps`.
    pub fn halving(kind: TightnessKind, n: usize, r: usize, start: f64, steps: usize) -> Result<Self> {
        let epsilons = (0..steps).map(|k| start * 0.5f64.powi(k as i32)).collect();
        let seq = Self { kind, n, r, epsilons };
        seq.validate()?;
        Ok(seq)
    }

    /// The default schedule `0.4 · 2^{−k}`.
    pub fn standard(kind: TightnessKind, n: usize, r: usize, steps: usize) -> Result<Self> {
        Self::halving(kind, n, r, 0.4, steps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == TightnessKind::Divergence {
            if self.r == 0 || self.r > self.n {
                return invalid(format!("need 1 <= r <= n, got n = {}, r = {}", self.n, self.r));
            }
            if let Some(k) = self.epsilons.iter().find(|&&k| !(k >= 1.0 && k.is_finite())) {
                return invalid(format!("divergence scale must be >= 1, got {k}"));
            }
            return Ok(());
        }
        if !(1 < self.r && self.r < self.n) {
            return invalid(format!("need 1 < r < n, got n = {}, r = {}", self.n, self.r));
        }
        if let Some(e) = self.epsilons.iter().find(|&&e| !(e > 0.0 && e < 0.5)) {
            return invalid(format!("epsilon must lie in (0, 1/2), got {e}"));
        }
        Ok(())
    }
}

/// `√k [I_r; 0] ∈ ℝ^{n×r}`.
pub fn generate_divergence<T: Scalar>(n: usize, r: usize, k: f64) -> Result<DenseMatrix<T>> {
    if r == 0 || r > n {
        return invalid(format!("need 1 <= r <= n, got n = {n}, r = {r}"));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return invalid(format!("scale must be >= 1, got {k}"));
    }
    Ok(DenseMatrix::identity(n, r).scale(T::lit(k.sqrt())))
}

fn prop5_matrix<T: Scalar>(kind: TightnessKind, n: usize, r: usize, eps: f64) -> DenseMatrix<T> {
    let (a, b, c, d) = match kind {
        TightnessKind::P5i => {
            let a = (1.0 - eps * eps).sqrt();
            let b = -eps * eps / a;
            (a, b, 0.0, (1.0 - eps * eps - b * b).sqrt())
        }
        TightnessKind::P5ii => (1.0, 0.0, 0.0, 1.0),
        TightnessKind::P5iii => (1.0, -eps * eps, 0.0, 1.0),
        TightnessKind::Divergence => unreachable!(),
    };
    let mut x = DenseMatrix::zeros(n, r);
    let head = [[eps, eps], [a, b], [c, d]];
    for (i, row) in head.iter().enumerate() {
        x.set(i, 0, T::lit(row[0]));
        x.set(i, 1, T::lit(row[1]));
    }
    for j in 2..r {
        x.set(j + 1, j, T::one());
    }
    x
}

/// Member `k` of the sequence and an analytic lower bound on its distance
/// to `St^{n,r}_+` (`ε_k` for the `P5*` kinds, `(√k − 1)√r` for divergence).
pub fn generate_tightness<T: Scalar>(seq: &TightnessSequence, k: usize) -> Result<(DenseMatrix<T>, T)> {
    seq.validate()?;
    let Some(&e) = seq.epsilons.get(k) else {
        return invalid(format!("index {k} out of range for {} terms", seq.epsilons.len()));
    };
    if seq.kind == TightnessKind::Divergence {
        let x = generate_divergence(seq.n, seq.r, e)?;
        return Ok((x, T::lit((e.sqrt() - 1.0) * (seq.r as f64).sqrt())));
    }
    Ok((prop5_matrix(seq.kind, seq.n, seq.r, e), T::lit(e)))
}

/// Measurements of one sequence member.
#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport<T> {
    pub k: usize,
    pub eps: T,
    /// Exact distance when within budget, else the analytic lower bound.
    pub dist: T,
    pub dist_is_exact: bool,
    pub analytic_lower: T,
    pub sign_violation: T,
    pub orth_violation: T,
    pub sigma_gap: T,
    /// The residual the sequence is measured against: `‖X_−‖` for `P5i`,
    /// `‖XᵀX − I‖` for `P5ii`, their sum for `P5iii`, `‖σ − 1‖` for
    /// divergence.
    pub residual: T,
    pub ratio_q05: T,
    pub ratio_q06: T,
    /// Right side of the stated lower bound (`1/√2` or `1/(√2+1)` times
    /// square roots of residuals).
    pub stated_lower: T,
    /// `dist ≥ stated_lower` (not applicable to divergence: always true).
    pub lower_bound_holds: bool,
}

impl<T: Scalar> TightnessReport<T> {
    /// `dist / ρ^q` for the residual combination of the sequence kind.
    pub fn ratio(kind: TightnessKind, dist: T, sign: T, orth: T, sigma: T, q: T) -> T {
        let den = match kind {
            TightnessKind::P5i => sign.powf(q),
            TightnessKind::P5ii => orth.powf(q),
            TightnessKind::P5iii => sign.powf(q) + orth.powf(q),
            TightnessKind::Divergence => sigma.powf(q),
        };
        dist / den
    }
}

pub fn check_tightness<T: Scalar>(
    seq: &TightnessSequence,
    k: usize,
    budget: EnumerationBudget,
) -> Result<TightnessReport<T>> {
    let (x, lower) = generate_tightness::<T>(seq, k)?;
    let res = frobenius_residual(&x, &SignPattern::nonnegative(seq.r))?;
    let (dist, exact) = if budget.allows(seq.n, seq.r) {
        (exact_project_nonneg_stiefel(&x, budget)?.1, true)
    } else {
        (lower, false)
    };
    let (sign, orth, sigma) = (res.sign_violation, res.orth_violation, sigma_gap(&x)?);
    let residual = match seq.kind {
        TightnessKind::P5i => sign,
        TightnessKind::P5ii => orth,
        TightnessKind::P5iii => sign + orth,
        TightnessKind::Divergence => sigma,
    };
    let half = T::lit(0.5);
    let stated_lower = match seq.kind {
        TightnessKind::P5i => sign.sqrt() / T::lit(2f64.sqrt()),
        TightnessKind::P5ii => orth.sqrt() / T::lit(2f64.sqrt()),
        TightnessKind::P5iii => (sign.sqrt() + orth.sqrt()) / T::lit(2f64.sqrt() + 1.0),
        TightnessKind::Divergence => T::zero(),
    };
    Ok(TightnessReport {
        k,
        eps: T::lit(seq.epsilons[k]),
        dist,
        dist_is_exact: exact,
        analytic_lower: lower,
        sign_violation: sign,
        orth_violation: orth,
        sigma_gap: sigma,
        residual,
        ratio_q05: TightnessReport::ratio(seq.kind, dist, sign, orth, sigma, half),
        ratio_q06: TightnessReport::ratio(seq.kind, dist, sign, orth, sigma, T::lit(0.6)),
        stated_lower,
        lower_bound_holds: dist >= stated_lower,
    })
}
