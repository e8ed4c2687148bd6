use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::linalg::{sigma_gap, DenseMatrix};
use crate::manifold::{frobenius_residual, nearest_sign_stiefel_upper, sign_reduce, SignPattern};
use crate::oracle::{
    dist_nonneg_sphere, exact_project_nonneg_stiefel, project_nonneg_sphere, EnumerationBudget,
};
use crate::scalar::Scalar;

/// Slack allowed on a certificate margin.
pub const MARGIN_TOL: f64 = 1e-9;

/// The error bounds that can be certified. A trailing `g`/`l` marks the
/// global and local form; ids without a suffix are global.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    /// `r = 1`: `2‖x_−‖ + |‖x‖ − 1|`.
    T1,
    /// `r = n`: `9n(‖X_−‖ + ‖σ − 1‖)`.
    T2g,
    /// `r = n`, local: `8√n(‖X_−‖ + ‖σ − 1‖)`.
    T2l,
    /// Local: `4√r(‖X_−‖^½ + ‖σ − 1‖^½)`.
    T4,
    /// `5r^¾(‖X_−‖^½ + ‖XᵀX − I‖^½)`.
    T5g,
    /// Local: `4√r(‖X_−‖^½ + ‖XᵀX − I‖^½)`.
    T5l,
    /// First column nonnegative, rest free: `7√r(‖(x₁)_−‖ + ‖XᵀX − I‖)`.
    P6g,
    P6l,
    /// First `r₁` columns nonnegative: `15r^¾(‖(X₁)_−‖^½ + ‖XᵀX − I‖^½)`.
    P7g,
    P7l,
    /// One signed column: `7√r(‖(S∘X)_−‖ + ‖XᵀX − I‖)`.
    T8,
    T8l,
    /// Every column signed, `r = n`: `9n(‖(S∘X)_−‖ + ‖σ − 1‖)`.
    T9,
    T9l,
    /// Any pattern: `15r^¾(‖(S∘X)_−‖^½ + ‖XᵀX − I‖^½)`.
    T10g,
    T10l,
}

impl TheoremId {
    pub const ALL: [TheoremId; 16] = [
        TheoremId::T1,
        TheoremId::T2g,
        TheoremId::T2l,
        TheoremId::T4,
        TheoremId::T5g,
        TheoremId::T5l,
        TheoremId::P6g,
        TheoremId::P6l,
        TheoremId::P7g,
        TheoremId::P7l,
        TheoremId::T8,
        TheoremId::T8l,
        TheoremId::T9,
        TheoremId::T9l,
        TheoremId::T10g,
        TheoremId::T10l,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::T1 => "T1",
            TheoremId::T2g => "T2g",
            TheoremId::T2l => "T2l",
            TheoremId::T4 => "T4",
            TheoremId::T5g => "T5g",
            TheoremId::T5l => "T5l",
            TheoremId::P6g => "P6g",
            TheoremId::P6l => "P6l",
            TheoremId::P7g => "P7g",
            TheoremId::P7l => "P7l",
            TheoremId::T8 => "T8",
            TheoremId::T8l => "T8l",
            TheoremId::T9 => "T9",
            TheoremId::T9l => "T9l",
            TheoremId::T10g => "T10g",
            TheoremId::T10l => "T10l",
        }
    }

    pub fn is_local(self) -> bool {
        matches!(
            self,
            TheoremId::T2l
                | TheoremId::T4
                | TheoremId::T5l
                | TheoremId::P6l
                | TheoremId::P7l
                | TheoremId::T8l
                | TheoremId::T9l
                | TheoremId::T10l
        )
    }

    /// Whether the bound is stated for this shape and sign pattern.
    pub fn applies(self, n: usize, pattern: &SignPattern) -> bool {
        let r = pattern.r();
        if r > n {
            return false;
        }
        let nonneg = pattern.is_all_nonnegative();
        let leading = pattern.negative().is_empty()
            && !pattern.positive().is_empty()
            && pattern.positive().iter().enumerate().all(|(k, &j)| k == j);
        match self {
            TheoremId::T1 => r == 1 && nonneg,
            TheoremId::T2g | TheoremId::T2l => r == n && nonneg,
            TheoremId::T4 | TheoremId::T5g | TheoremId::T5l => nonneg,
            TheoremId::P6g | TheoremId::P6l => leading && pattern.positive().len() == 1,
            TheoremId::P7g | TheoremId::P7l => leading,
            TheoremId::T8 | TheoremId::T8l => pattern.r1() == 1,
            TheoremId::T9 | TheoremId::T9l => pattern.r1() == n && r == n,
            TheoremId::T10g | TheoremId::T10l => true,
        }
    }

    pub fn applicable(n: usize, pattern: &SignPattern) -> Vec<TheoremId> {
        Self::ALL.into_iter().filter(|t| t.applies(n, pattern)).collect()
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown theorem id {s:?}")))
    }
}

/// Outcome of evaluating one bound at one matrix.
#[derive(Debug, Clone)]
pub struct BoundCertificate<T: Scalar> {
    pub theorem_id: TheoremId,
    /// Feasible point realising `lhs_value`.
    pub feasible_point: DenseMatrix<T>,
    /// `‖X − X̄‖_F`: the exact distance if `lhs_is_exact`, else an upper bound.
    pub lhs_value: T,
    pub rhs_value: T,
    /// Local precondition; always true for global bounds.
    pub regime_ok: bool,
    pub margin: T,
    pub lhs_is_exact: bool,
}

impl<T: Scalar> BoundCertificate<T> {
    /// Margin within tolerance. A local bound outside its regime asserts
    /// nothing and never fails.
    pub fn passes(&self) -> bool {
        !self.regime_ok || self.margin >= T::lit(-MARGIN_TOL)
    }
}

/// Distance (or a certified upper bound on it) from `X` to `St^{n,r}_S`.
#[derive(Debug, Clone)]
pub struct FeasibleDistance<T: Scalar> {
    pub point: DenseMatrix<T>,
    pub value: T,
    pub exact: bool,
}

/// Exact distance when an exact method exists within `budget`: free pattern
/// (polar factor), a single signed column, or all columns signed (support
/// enumeration). Otherwise the constructive upper bound.
pub fn feasible_distance<T: Scalar>(
    x: &DenseMatrix<T>,
    pattern: &SignPattern,
    budget: EnumerationBudget,
) -> Result<FeasibleDistance<T>> {
    let (n, r) = x.shape();
    pattern.check_shape(x)?;
    let r1 = pattern.r1();
    if r1 == 0 {
        let (point, value) = nearest_sign_stiefel_upper(x, pattern)?;
        return Ok(FeasibleDistance { point, value, exact: true });
    }
    if r1 == r {
        let red = sign_reduce(x, pattern)?;
        if r == 1 {
            let u = project_nonneg_sphere(red.y.column(0));
            let point = red.restore(&DenseMatrix::from_columns(&[u])?);
            let value = dist_nonneg_sphere(red.y.column(0));
            return Ok(FeasibleDistance { point, value, exact: true });
        }
        if budget.allows(n, r) {
            let (proj, _) = exact_project_nonneg_stiefel(&red.y, budget)?;
            let point = red.restore(&proj);
            let value = (x - &point).frobenius_norm();
            return Ok(FeasibleDistance { point, value, exact: true });
        }
    }
    let (point, value) = nearest_sign_stiefel_upper(x, pattern)?;
    Ok(FeasibleDistance { point, value, exact: false })
}

/// Residual pieces every right-hand side is built from.
#[derive(Debug, Clone, Copy)]
struct Pieces<T> {
    sign: T,
    orth: T,
    sigma: T,
    col_norm: T,
}

fn pieces<T: Scalar>(x: &DenseMatrix<T>, pattern: &SignPattern) -> Result<Pieces<T>> {
    let res = frobenius_residual(x, pattern)?;
    let col_norm = crate::linalg::norm2(x.column(0));
    Ok(Pieces { sign: res.sign_violation, orth: res.orth_violation, sigma: res.sigma_gap, col_norm })
}

/// Right-hand side and local precondition of `id` at `X`.
fn rhs<T: Scalar>(id: TheoremId, n: usize, r: usize, p: Pieces<T>) -> (T, bool) {
    let nf = T::lit(n as f64);
    let rf = T::lit(r as f64);
    let one = T::one();
    let sqrt_sum = p.sign.sqrt() + p.orth.sqrt();
    match id {
        TheoremId::T1 => (T::lit(2.0) * p.sign + (p.col_norm - one).abs(), true),
        TheoremId::T2g | TheoremId::T9 => (T::lit(9.0) * nf * (p.sign + p.sigma), true),
        TheoremId::T2l | TheoremId::T9l => (
            T::lit(8.0) * nf.sqrt() * (p.sign + p.sigma),
            p.sign + p.sigma < one / (T::lit(4.0) * nf.sqrt()),
        ),
        TheoremId::T4 => (
            T::lit(4.0) * rf.sqrt() * (p.sign.sqrt() + p.sigma.sqrt()),
            p.sign + p.sigma < one / (T::lit(3.0) * rf.sqrt()),
        ),
        TheoremId::T5g => (T::lit(5.0) * rf.powf(T::lit(0.75)) * sqrt_sum, true),
        TheoremId::T5l => (
            T::lit(4.0) * rf.sqrt() * sqrt_sum,
            p.sign + p.orth < one / (T::lit(3.0) * rf.sqrt()),
        ),
        TheoremId::P6g | TheoremId::T8 => (T::lit(7.0) * rf.sqrt() * (p.sign + p.orth), true),
        TheoremId::P6l | TheoremId::T8l => (T::lit(7.0) * (p.sign + p.orth), p.orth < one / T::lit(3.0)),
        TheoremId::P7g | TheoremId::T10g => (T::lit(15.0) * rf.powf(T::lit(0.75)) * sqrt_sum, true),
        TheoremId::P7l | TheoremId::T10l => (
            T::lit(15.0) * rf.sqrt() * sqrt_sum,
            p.sign + p.orth < one / (T::lit(3.0) * rf.sqrt()),
        ),
    }
}

fn certificate<T: Scalar>(
    id: TheoremId,
    n: usize,
    r: usize,
    p: Pieces<T>,
    d: &FeasibleDistance<T>,
) -> BoundCertificate<T> {
    let (rhs_value, regime_ok) = rhs(id, n, r, p);
    BoundCertificate {
        theorem_id: id,
        feasible_point: d.point.clone(),
        lhs_value: d.value,
        rhs_value,
        regime_ok,
        margin: rhs_value - d.value,
        lhs_is_exact: d.exact,
    }
}

/// Evaluates one bound at `X`.
///
/// For a local bound outside its regime the certificate is still returned,
/// with `regime_ok = false`.
pub fn check_bound<T: Scalar>(
    x: &DenseMatrix<T>,
    pattern: &SignPattern,
    id: TheoremId,
    budget: EnumerationBudget,
) -> Result<BoundCertificate<T>> {
    let (n, r) = x.shape();
    pattern.check_shape(x)?;
    if !id.applies(n, pattern) {
        return invalid(format!("{id} does not apply to n = {n}, r = {r}, pattern {pattern}"));
    }
    let p = pieces(x, pattern)?;
    let d = feasible_distance(x, pattern, budget)?;
    Ok(certificate(id, n, r, p, &d))
}

/// Every applicable bound at `X`, sharing one distance computation. Local
/// bounds whose precondition fails are left out.
pub fn certify_all<T: Scalar>(
    x: &DenseMatrix<T>,
    pattern: &SignPattern,
    budget: EnumerationBudget,
) -> Result<Vec<BoundCertificate<T>>> {
    let (n, r) = x.shape();
    let ids = TheoremId::applicable(n, pattern);
    let p = pieces(x, pattern)?;
    let d = feasible_distance(x, pattern, budget)?;
    Ok(ids
        .into_iter()
        .map(|id| certificate(id, n, r, p, &d))
        .filter(|c| c.regime_ok)
        .collect())
}

/// `dist(X, St^{n,r}_+) / max(‖X_−‖_F, ‖σ(X) − 1‖₂)` with the exact
/// distance. Zero for feasible `X`.
pub fn regularity_gamma<T: Scalar>(x: &DenseMatrix<T>, budget: EnumerationBudget) -> Result<T> {
    let (_, dist) = exact_project_nonneg_stiefel(x, budget)?;
    let den = x.negative_part().frobenius_norm().max(sigma_gap(x)?);
    if den == T::zero() {
        if dist > T::lit(1e-12) {
            return Err(Error::Internal(format!("distance {dist} with zero residual")));
        }
        return Ok(T::zero());
    }
    Ok(dist / den)
}
