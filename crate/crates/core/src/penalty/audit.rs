use super::objective::ObjectiveSpec;
use super::problem::{penalty_value, Domain, PenaltyProblem};
use crate::bounds::{generate_tightness, TightnessKind, TightnessSequence};
use crate::error::{Error, Result};
use crate::linalg::{polar_factor, DenseMatrix};
use crate::manifold::SignPattern;
use crate::oracle::{
    exact_project_nonneg_stiefel, min_linear_nonneg_stiefel, permutation_matrix, project_nonneg_sphere,
    solve_assignment, EnumerationBudget,
};
use crate::sampling::{child_seed, gaussian_matrix, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditTrials {
    /// Multistart local searches.
    pub starts: usize,
    /// Random probe points.
    pub probes: usize,
    pub seed: u64,
    /// A probe beats the reference only if it is lower by more than this.
    pub tol: f64,
    /// Penalty evaluations allowed per local search.
    pub max_evals: usize,
}

impl Default for AuditTrials {
    fn default() -> Self {
        Self { starts: 50, probes: 1000, seed: 0, tol: 1e-8, max_evals: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveAuditReport {
    pub reference_point: DenseMatrix<f64>,
    /// Penalised value at the constrained optimum (equal to the raw value).
    pub reference_value: f64,
    pub best_point: DenseMatrix<f64>,
    pub best_value: f64,
    /// `best_value − reference_value`; negative means a probe did better.
    pub worst_margin: f64,
    pub evaluations: usize,
    pub passes: bool,
}

/// Constrained minimiser of a linear objective over `St^{n,r}_+`: the
/// nonnegative sphere for `r = 1`, permutations for `r = n`, enumeration
/// otherwise.
fn reference_optimum(prob: &PenaltyProblem<f64>, n: usize, budget: EnumerationBudget) -> Result<DenseMatrix<f64>> {
    let ObjectiveSpec::Linear { c } = &prob.objective else {
        return Err(Error::Unsupported("reference optimum needs a linear objective".into()));
    };
    if !prob.pattern.is_all_nonnegative() {
        return Err(Error::Unsupported("reference optimum needs an all-nonnegative pattern".into()));
    }
    let r = prob.pattern.r();
    if c.shape() != (n, r) {
        return Err(Error::InvalidInput("objective shape mismatch".into()));
    }
    if r == 1 {
        let neg: Vec<f64> = c.column(0).iter().map(|v| -v).collect();
        return DenseMatrix::from_columns(&[project_nonneg_sphere(&neg)]);
    }
    if r == n {
        return Ok(permutation_matrix(&solve_assignment(c)?));
    }
    match min_linear_nonneg_stiefel(c, budget) {
        Ok((u, _)) => Ok(u),
        Err(Error::BudgetExceeded { .. }) => Err(Error::Unsupported("instance too large to enumerate".into())),
        Err(e) => Err(e),
    }
}

fn into_domain(x: DenseMatrix<f64>, domain: Domain) -> Result<DenseMatrix<f64>> {
    Ok(match domain {
        Domain::Stiefel => polar_factor(&x)?,
        Domain::NonnegOrthant => x.map(f64::abs),
        Domain::FullSpace => x,
    })
}

/// Derivative-free coordinate (compass) search, mapping every trial back
/// into the domain.
fn compass_search(
    prob: &PenaltyProblem<f64>,
    x0: DenseMatrix<f64>,
    max_evals: usize,
) -> Result<(DenseMatrix<f64>, f64, usize)> {
    let mut x = x0;
    let mut fx = penalty_value(&x, prob)?;
    let mut evals = 1;
    let mut step = 0.5;
    let (n, r) = x.shape();
    while step > 1e-10 && evals < max_evals {
        let mut improved = false;
        'poll: for j in 0..r {
            for i in 0..n {
                for dir in [1.0, -1.0] {
                    let mut y = x.clone();
                    y.set(i, j, y.get(i, j) + dir * step);
                    let y = match prob.domain {
                        Domain::NonnegOrthant => y.map(|v| v.max(0.0)),
                        d => into_domain(y, d)?,
                    };
                    let fy = penalty_value(&y, prob)?;
                    evals += 1;
                    if fy < fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                    if evals >= max_evals {
                        break 'poll;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((x, fx, evals))
}

/// Checks that no multistart local search or random probe finds a
/// penalised value below the constrained optimum.
pub fn exactness_audit(
    prob: &PenaltyProblem<f64>,
    n: usize,
    trials: &AuditTrials,
    budget: EnumerationBudget,
) -> Result<PositiveAuditReport> {
    let r = prob.pattern.r();
    let reference_point = reference_optimum(prob, n, budget)?;
    let reference_value = penalty_value(&reference_point, prob)?;
    let mut best_point = reference_point.clone();
    let mut best_value = f64::INFINITY;
    let mut evaluations = 0;
    let mut consider = |x: DenseMatrix<f64>, v: f64| {
        if v < best_value {
            best_value = v;
            best_point = x;
        }
    };

    for s in 0..trials.starts {
        let mut rng = rng_from_seed(child_seed(trials.seed, s as u64));
        let x0 = into_domain(gaussian_matrix(&mut rng, n, r), prob.domain)?;
        let (x, v, e) = compass_search(prob, x0, trials.max_evals)?;
        evaluations += e;
        consider(x, v);
    }
    const SCALES: [f64; 3] = [0.1, 1.0, 3.0];
    const OFFSETS: [f64; 4] = [1e-4, 1e-3, 1e-2, 1e-1];
    for k in 0..trials.probes {
        let mut rng = rng_from_seed(child_seed(trials.seed ^ 0x5052_4f42, k as u64));
        let g = gaussian_matrix(&mut rng, n, r);
        let raw = if k % 2 == 0 {
            g.scale(SCALES[(k / 2) % SCALES.len()])
        } else {
            &reference_point + &g.scale(OFFSETS[(k / 2) % OFFSETS.len()])
        };
        let x = into_domain(raw, prob.domain)?;
        let v = penalty_value(&x, prob)?;
        evaluations += 1;
        consider(x, v);
    }

    let worst_margin = best_value - reference_value;
    Ok(PositiveAuditReport {
        reference_point,
        reference_value,
        best_point,
        best_value,
        worst_margin,
        evaluations,
        passes: worst_margin >= -trials.tol,
    })
}

/// `0.2·2^{−j}` for `j = 0..=20`.
pub fn standard_eps_grid() -> Vec<f64> {
    (0..=20).map(|j| 0.2 * 0.5f64.powi(j)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonExactnessRow {
    pub q2: f64,
    pub mu: f64,
    pub eps: f64,
    pub probe_value: f64,
    pub limit_value: f64,
}

impl NonExactnessRow {
    /// `limit_value − probe_value`; positive means the probe beats the limit.
    pub fn margin(&self) -> f64 {
        self.limit_value - self.probe_value
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOutcome {
    pub q2: f64,
    pub mu: f64,
    /// Largest grid value of `ε` with a strict violation.
    pub violating_eps: Option<f64>,
    pub best_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonExactnessReport {
    pub rows: Vec<NonExactnessRow>,
    pub pairs: Vec<PairOutcome>,
}

impl NonExactnessReport {
    /// Every `(q2, μ)` pair has a strict violation on the grid.
    pub fn all_violated(&self) -> bool {
        self.pairs.iter().all(|p| p.violating_eps.is_some())
    }
}

/// Penalises `F(X) = −dist(X, St^{n,r}_+)` with Gram exponent `q2` and
/// compares the penalised value along the nonnegative path
/// `X_ε = [ε ε; 1 0; 0 1; …]` with its feasible limit `X*`.
pub fn non_exactness_audit(
    n: usize,
    r: usize,
    q2s: &[f64],
    mus: &[f64],
    eps_grid: &[f64],
    budget: EnumerationBudget,
) -> Result<NonExactnessReport> {
    let seq = TightnessSequence { kind: TightnessKind::P5ii, n, r, epsilons: eps_grid.to_vec() };
    seq.validate()?;
    let path: Vec<DenseMatrix<f64>> =
        (0..eps_grid.len()).map(|k| generate_tightness(&seq, k).map(|(x, _)| x)).collect::<Result<_>>()?;
    let mut limit = DenseMatrix::zeros(n, r);
    for j in 0..r {
        limit.set(j + 1, j, 1.0);
    }
    // the objective does not depend on μ or q2, so evaluate it once
    let f_limit = -exact_project_nonneg_stiefel(&limit, budget)?.1;
    let f_path: Vec<f64> =
        path.iter().map(|x| exact_project_nonneg_stiefel(x, budget).map(|(_, d)| -d)).collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    for &q2 in q2s {
        for &mu in mus {
            let prob = PenaltyProblem::new(
                ObjectiveSpec::NegDistOracle { budget },
                mu,
                2.0,
                q2,
                q2,
                Domain::FullSpace,
                SignPattern::nonnegative(r),
            )?;
            prob.check_domain(&limit)?;
            let limit_value = f_limit + mu * prob.penalty_term(&limit)?;
            let mut outcome = PairOutcome { q2, mu, violating_eps: None, best_margin: f64::NEG_INFINITY };
            for ((x, &eps), &f) in path.iter().zip(eps_grid).zip(&f_path) {
                let row = NonExactnessRow { q2, mu, eps, probe_value: f + mu * prob.penalty_term(x)?, limit_value };
                if row.margin() > 0.0 && outcome.violating_eps.is_none() {
                    outcome.violating_eps = Some(eps);
                }
                outcome.best_margin = outcome.best_margin.max(row.margin());
                rows.push(row);
            }
            pairs.push(outcome);
        }
    }
    Ok(NonExactnessReport { rows, pairs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub x_star: DenseMatrix<f64>,
    pub x_hat: DenseMatrix<f64>,
    pub f_star: f64,
    pub f_hat: f64,
    /// `‖X̂ᵀX̂ − I‖_F`.
    pub hat_orth_error: f64,
    pub hat_min_entry: f64,
    /// Exact distances of both points to `St^{3,2}_+`.
    pub star_dist: f64,
    pub hat_dist: f64,
    /// `min f` over `St^{3,2}_+` by enumeration.
    pub constrained_min: f64,
    pub passes: bool,
}

/// `f(X) = −2X₁₁ − 2X₂₂ − X₃₁ − X₃₂` on `St^{3,2}_+`: the point
/// `X* = [e₁ e₂]` is beaten by `X̂ = [(2, 0, 1)/√5, e₂]`.
pub fn counterexample_audit() -> Result<CounterexampleReport> {
    let c = DenseMatrix::from_rows(&[[-2.0, 0.0], [0.0, -2.0], [-1.0, -1.0]])?;
    let s5 = 5f64.sqrt();
    let x_star = DenseMatrix::identity(3, 2);
    let x_hat = DenseMatrix::from_rows(&[[2.0 / s5, 0.0], [0.0, 1.0], [1.0 / s5, 0.0]])?;
    let f_star = c.inner(&x_star);
    let f_hat = c.inner(&x_hat);
    let hat_orth_error = x_hat.gram_residual().frobenius_norm();
    let hat_min_entry = x_hat.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    let budget = EnumerationBudget::default();
    let star_dist = exact_project_nonneg_stiefel(&x_star, budget)?.1;
    let hat_dist = exact_project_nonneg_stiefel(&x_hat, budget)?.1;
    let constrained_min = min_linear_nonneg_stiefel(&c, budget)?.1;
    let passes = hat_orth_error <= 1e-12
        && hat_min_entry >= 0.0
        && (f_star + 4.0).abs() <= 1e-12
        && (f_hat + s5 + 2.0).abs() <= 1e-12
        && f_hat < f_star
        && star_dist <= 1e-12
        && hat_dist <= 1e-12;
    Ok(CounterexampleReport {
        x_star,
        x_hat,
        f_star,
        f_hat,
        hat_orth_error,
        hat_min_entry,
        star_dist,
        hat_dist,
        constrained_min,
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::mu_threshold_global;

    #[test]
    fn counterexample_checks_pass() {
        let rep = counterexample_audit().unwrap();
        assert!(rep.passes, "{rep:?}");
        assert!((rep.f_hat - (-4.236_067_977_499_79)).abs() < 1e-12);
        assert!(rep.constrained_min <= rep.f_hat + 1e-12);
    }

    #[test]
    fn sphere_instance_is_exact() {
        let c = DenseMatrix::from_columns(&[[1.0, -2.0, 0.0, 1.0, 3.0]]).unwrap();
        let l = c.frobenius_norm();
        let mu = 1.1 * mu_threshold_global(l, 5, 1, 2.0);
        let prob = PenaltyProblem::new(
            ObjectiveSpec::Linear { c },
            mu,
            2.0,
            0.5,
            0.5,
            Domain::FullSpace,
            SignPattern::nonnegative(1),
        )
        .unwrap();
        let trials = AuditTrials { starts: 5, probes: 100, ..Default::default() };
        let rep = exactness_audit(&prob, 5, &trials, EnumerationBudget::default()).unwrap();
        assert_eq!(rep.reference_point.column(0), &[0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(rep.reference_value, -2.0);
        assert!(rep.passes, "{rep:?}");
    }

    #[test]
    fn small_mu_is_not_exact() {
        let c = DenseMatrix::from_columns(&[[1.0, -2.0, 0.0, 1.0, 3.0]]).unwrap();
        let prob =
            PenaltyProblem::new(ObjectiveSpec::Linear { c }, 0.1, 2.0, 0.5, 0.5, Domain::FullSpace, SignPattern::nonnegative(1))
                .unwrap();
        let trials = AuditTrials { starts: 3, probes: 10, ..Default::default() };
        let rep = exactness_audit(&prob, 5, &trials, EnumerationBudget::default()).unwrap();
        assert!(!rep.passes);
    }

    #[test]
    fn non_exactness_with_linear_gram_exponent() {
        let rep = non_exactness_audit(4, 2, &[1.0], &[1.0, 10.0], &standard_eps_grid(), EnumerationBudget::default()).unwrap();
        assert!(rep.all_violated());
        // nearest point: first column (ε, 1, 0, 0) normalised, second e₃
        let row = rep.rows[3];
        let e = row.eps;
        let dist = (((1.0 + e * e).sqrt() - 1.0).powi(2) + e * e).sqrt();
        assert!((row.probe_value - (-dist + 2.0 * e * e * row.mu)).abs() < 1e-12);
        assert_eq!(row.limit_value, 0.0);
    }

    #[test]
    fn unsupported_reference() {
        let prob = PenaltyProblem::new(
            ObjectiveSpec::NegDistOracle { budget: EnumerationBudget::default() },
            1.0,
            2.0,
            0.5,
            0.5,
            Domain::FullSpace,
            SignPattern::nonnegative(2),
        )
        .unwrap();
        let err = exactness_audit(&prob, 4, &AuditTrials::default(), EnumerationBudget::default()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
