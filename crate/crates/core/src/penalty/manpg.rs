use super::objective::ObjectiveSpec;
use super::problem::{Domain, PenaltyProblem};
use crate::error::{Error, Result};
use crate::linalg::{dot, polar_factor, solve_linear, DenseMatrix};
use crate::manifold::{frobenius_residual, ColumnSign, ResidualValue};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManpgSettings {
    pub max_iters: usize,
    /// Stop once `‖V‖_F / t` drops below this.
    pub tol: f64,
    /// Proximal step `t`; defaults to `1/L` for the gradient Lipschitz
    /// constant `L` of the smooth part (or 1 when that is zero).
    pub step: Option<f64>,
    pub inner_max_iters: usize,
    pub inner_tol: f64,
    pub armijo: f64,
    pub max_halvings: usize,
}

impl Default for ManpgSettings {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-6,
            step: None,
            inner_max_iters: 100,
            inner_tol: 1e-8,
            armijo: 1e-4,
            max_halvings: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T: Scalar> {
    pub final_point: DenseMatrix<T>,
    /// Penalised objective at the start point and after every iteration.
    pub objective_trace: Vec<T>,
    pub feasibility_trace: Vec<ResidualValue<T>>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖V‖_F / t` at the last computed direction.
    pub stationarity_measure: T,
}

/// Smooth part of the objective plus the entry-wise nonsmooth part
/// `Σ a_ij |x_ij| + b_j max(−s_j x_ij, 0)`.
struct Split<'a, T: Scalar> {
    objective: &'a ObjectiveSpec<T>,
    /// `a_ij`.
    l1: DenseMatrix<T>,
    /// `b_j` and `s_j` per column.
    sign_weight: Vec<T>,
    sign: Vec<T>,
    gram_a: Option<DenseMatrix<T>>,
}

impl<'a, T: Scalar> Split<'a, T> {
    fn new(prob: &'a PenaltyProblem<T>, n: usize) -> Result<Self> {
        let r = prob.pattern.r();
        let (l1, gram_a) = match &prob.objective {
            ObjectiveSpec::Linear { .. } => (DenseMatrix::zeros(n, r), None),
            ObjectiveSpec::SparseTrace { a, lambda, weights } => {
                if weights.shape() != (n, r) {
                    return Err(Error::InvalidInput("weight matrix shape mismatch".into()));
                }
                (weights.map(|w| w.abs() * *lambda), Some(a.tr_matmul(a)))
            }
            _ => return Err(Error::Unsupported("solver needs a linear or sparse trace objective".into())),
        };
        let mut sign_weight = vec![T::zero(); r];
        let mut sign = vec![T::zero(); r];
        for j in 0..r {
            match prob.pattern.column(j) {
                ColumnSign::Nonnegative => (sign_weight[j], sign[j]) = (prob.mu, T::one()),
                ColumnSign::Nonpositive => (sign_weight[j], sign[j]) = (prob.mu, -T::one()),
                ColumnSign::Free => {}
            }
        }
        Ok(Self { objective: &prob.objective, l1, sign_weight, sign, gram_a })
    }

    fn smooth_value(&self, x: &DenseMatrix<T>) -> T {
        match (self.objective, &self.gram_a) {
            (ObjectiveSpec::Linear { c }, _) => c.inner(x),
            (_, Some(m)) => -x.inner(&m.matmul(x)),
            _ => unreachable!("checked in Split::new"),
        }
    }

    fn gradient(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        match (self.objective, &self.gram_a) {
            (ObjectiveSpec::Linear { c }, _) => c.clone(),
            (_, Some(m)) => m.matmul(x).scale(T::lit(-2.0)),
            _ => unreachable!("checked in Split::new"),
        }
    }

    fn nonsmooth_value(&self, x: &DenseMatrix<T>) -> T {
        let mut h = T::zero();
        for j in 0..x.cols() {
            for (i, &v) in x.column(j).iter().enumerate() {
                h = h + self.l1.get(i, j) * v.abs() + self.sign_weight[j] * (-self.sign[j] * v).max(T::zero());
            }
        }
        h
    }

    fn value(&self, x: &DenseMatrix<T>) -> T {
        self.smooth_value(x) + self.nonsmooth_value(x)
    }

    /// Entry-wise prox of `t·h` and the 0/1 mask of its derivative.
    fn prox(&self, v: &DenseMatrix<T>, t: T) -> (DenseMatrix<T>, DenseMatrix<T>) {
        let (n, r) = v.shape();
        let mut w = DenseMatrix::zeros(n, r);
        let mut d = DenseMatrix::zeros(n, r);
        for j in 0..r {
            for i in 0..n {
                let a = t * self.l1.get(i, j);
                let b = t * self.sign_weight[j];
                // slope on the positive and negative half-lines
                let (up, down) = if self.sign[j] > T::zero() {
                    (a, a + b)
                } else if self.sign[j] < T::zero() {
                    (a + b, a)
                } else {
                    (a, a)
                };
                let x = v.get(i, j);
                let (val, der) = if x > up {
                    (x - up, T::one())
                } else if x < -down {
                    (x + down, T::one())
                } else {
                    (T::zero(), T::zero())
                };
                w.set(i, j, val);
                d.set(i, j, der);
            }
        }
        (w, d)
    }
}

fn sym_pairs(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|k| (k..r).map(move |l| (k, l))).collect()
}

fn sym_part_vec<T: Scalar>(x: &DenseMatrix<T>, dw: &DenseMatrix<T>, pairs: &[(usize, usize)]) -> Vec<T> {
    let m = x.tr_matmul(dw);
    pairs.iter().map(|&(k, l)| m.get(k, l) + m.get(l, k)).collect()
}

fn vec_norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Solves `XᵀV + VᵀX = 0` for the multiplier `Λ`, where
/// `V(Λ) = prox_{th}(X − t(G − 2XΛ)) − X`. `E(Λ) = XᵀV + VᵀX` is minus the
/// gradient of the concave dual function
/// `θ(Λ) = ⟨G, V⟩ + ‖V‖²/(2t) + h(X + V) − ⟨Λ, E⟩`, so regularised
/// semismooth Newton steps are safeguarded by an ascent line search on `θ`.
/// Returns `V` and the final multiplier.
fn tangent_direction<T: Scalar>(
    split: &Split<'_, T>,
    x: &DenseMatrix<T>,
    g: &DenseMatrix<T>,
    t: T,
    lambda0: &DenseMatrix<T>,
    settings: &ManpgSettings,
) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let r = x.cols();
    let pairs = sym_pairs(r);
    let m = pairs.len();
    // Frobenius weight of each coordinate of a symmetric matrix
    let weight: Vec<T> = pairs.iter().map(|&(k, l)| if k == l { T::one() } else { T::lit(2.0) }).collect();
    let mut index = vec![vec![0; r]; r];
    for (c, &(k, l)) in pairs.iter().enumerate() {
        index[k][l] = c;
    }
    let two_t = T::lit(2.0) * t;
    let half_over_t = T::lit(0.5) / t;
    let eval = |lam: &DenseMatrix<T>| {
        let arg = x - &(g - &x.matmul(lam).scale(T::lit(2.0))).scale(t);
        let (w, d) = split.prox(&arg, t);
        let v = &w - x;
        let e = sym_part_vec(x, &v, &pairs);
        let lam_e = pairs.iter().zip(&e).zip(&weight).fold(T::zero(), |acc, ((&(k, l), &ev), &wt)| {
            acc + wt * lam.get(k, l) * ev
        });
        let theta = g.inner(&v) + v.inner(&v) * half_over_t + split.nonsmooth_value(&w) - lam_e;
        (v, d, e, theta)
    };
    let mut lam = lambda0.clone();
    let (mut v, mut d, mut e, mut theta) = eval(&lam);
    // an inexact multiplier leaves a normal component of size about ‖E‖/4
    // in V, so the inner tolerance must sit below the outer one
    let tol = T::lit(settings.inner_tol.min(1e-2 * settings.tol)) * t;
    for _ in 0..settings.inner_max_iters {
        let en = vec_norm(&e);
        if en <= tol {
            break;
        }
        // Hessian of −θ in the symmetric coordinates: H[row][c] = ⟨B_row, E'(Λ)B_c⟩
        let mut hess = DenseMatrix::zeros(m, m);
        for (c, &(k, l)) in pairs.iter().enumerate() {
            // X B for the symmetric basis element at (k, l) has column l equal
            // to x_k and column k equal to x_l, so only those columns of
            // Xᵀ(D∘XB) are nonzero.
            let mut mcols: Vec<(usize, Vec<T>)> = Vec::with_capacity(2);
            for (j, src) in [(l, k), (k, l)] {
                if mcols.iter().any(|(jj, _)| *jj == j) {
                    continue;
                }
                let dw: Vec<T> = d.column(j).iter().zip(x.column(src)).map(|(&m, &v)| m * v * two_t).collect();
                mcols.push((j, (0..r).map(|a| dot(x.column(a), &dw)).collect()));
            }
            // E_ab = M_ab + M_ba, so M(a, j) lands in the (a, j) coordinate
            for (j, col) in &mcols {
                for (a, &val) in col.iter().enumerate() {
                    let row = index[a.min(*j)][a.max(*j)];
                    let add = if a == *j { val + val } else { val };
                    hess.set(row, c, hess.get(row, c) + weight[row] * add);
                }
            }
        }
        let grad: Vec<T> = e.iter().zip(&weight).map(|(&ev, &wt)| wt * ev).collect();
        let reg = T::lit(1e-10) * (T::one() + hess.max_abs()) + T::lit(0.1) * en.min(T::one());
        let rhs: Vec<T> = grad.iter().map(|&v| -v).collect();
        let mut step = solve_linear(&(&hess + &DenseMatrix::identity(m, m).scale(reg)), &rhs).ok();
        // θ increases along `step` iff −gradᵀ step > 0
        let mut slope = step.as_ref().map_or(T::zero(), |s| -dot(&grad, s));
        if !(slope > T::zero()) {
            slope = dot(&grad, &grad);
            step = Some(rhs.iter().map(|&v| v * t).collect());
            slope = slope * t;
        }
        let step = step.expect("set above");
        let mut delta = DenseMatrix::zeros(r, r);
        for (&(k, l), &s) in pairs.iter().zip(&step) {
            delta.set(k, l, s);
            delta.set(l, k, s);
        }
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..20 {
            let trial = &lam + &delta.scale(alpha);
            let (tv, td, te, tt) = eval(&trial);
            // near the solution the increase of θ drops below rounding, so a
            // clear decrease of ‖E‖ is accepted as well
            if tt >= theta + T::lit(1e-4) * alpha * slope || vec_norm(&te) <= T::lit(0.9) * en {
                (lam, v, d, e, theta) = (trial, tv, td, te, tt);
                accepted = true;
                break;
            }
            alpha = alpha * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    (v, lam)
}

/// Manifold proximal gradient for `f(X) + h(X)` over the Stiefel manifold,
/// with `h` the entry-wise `ℓ1` term of the objective plus
/// `μ‖(S∘X)_−‖_{ℓ1}`. Needs `p = q1 = 1` and the Stiefel domain.
pub fn solve_manpg<T: Scalar>(
    prob: &PenaltyProblem<T>,
    x0: &DenseMatrix<T>,
    settings: &ManpgSettings,
) -> Result<SolveReport<T>> {
    if prob.domain != Domain::Stiefel {
        return Err(Error::Unsupported("solver works on the Stiefel domain only".into()));
    }
    if prob.p != T::one() || prob.q1 != T::one() {
        return Err(Error::Unsupported("solver needs p = 1 and q1 = 1 so the penalty is entry-wise".into()));
    }
    prob.check_domain(x0)?;
    let split = Split::new(prob, x0.rows())?;
    let t = match settings.step {
        Some(s) if s > 0.0 => T::lit(s),
        Some(s) => return Err(Error::InvalidInput(format!("step must be positive, got {s}"))),
        None => match prob.objective.smooth_lipschitz()? {
            Some(l) if l > T::zero() => T::one() / l,
            _ => T::one(),
        },
    };

    let r = x0.cols();
    let mut x = x0.clone();
    let mut fx = split.value(&x);
    let mut objective_trace = vec![fx];
    let mut feasibility_trace = vec![frobenius_residual(&x, &prob.pattern)?];
    let mut lam = DenseMatrix::zeros(r, r);
    let mut stationarity = T::infinity();
    let mut converged = false;
    let mut iterations = 0;
    let tol = T::lit(settings.tol);
    let sigma = T::lit(settings.armijo);

    while iterations < settings.max_iters {
        let g = split.gradient(&x);
        let (v, new_lam) = tangent_direction(&split, &x, &g, t, &lam, settings);
        lam = new_lam;
        let vn2 = v.inner(&v);
        stationarity = vn2.sqrt() / t;
        if stationarity <= tol {
            converged = true;
            break;
        }
        let mut alpha = T::one();
        let mut next = None;
        for _ in 0..=settings.max_halvings {
            let trial = polar_factor(&(&x + &v.scale(alpha)))?;
            let ft = split.value(&trial);
            if ft <= fx - sigma * alpha * vn2 / t {
                next = Some((trial, ft));
                break;
            }
            alpha = alpha * T::lit(0.5);
        }
        let Some((xn, fnext)) = next else { break };
        x = xn;
        fx = fnext;
        iterations += 1;
        objective_trace.push(fx);
        feasibility_trace.push(frobenius_residual(&x, &prob.pattern)?);
    }

    Ok(SolveReport {
        final_point: x,
        objective_trace,
        feasibility_trace,
        iterations,
        converged,
        stationarity_measure: stationarity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::SignPattern;
    use crate::sampling::{random_stiefel, rng_from_seed};

    fn problem(obj: ObjectiveSpec<f64>, mu: f64, pattern: SignPattern) -> PenaltyProblem<f64> {
        PenaltyProblem::new(obj, mu, 1.0, 1.0, 0.5, Domain::Stiefel, pattern).unwrap()
    }

    #[test]
    fn prox_thresholds() {
        let prob = problem(
            ObjectiveSpec::sparse_trace(DenseMatrix::identity(3, 3), 1.0, 3),
            2.0,
            SignPattern::new(3, &[0], &[1]).unwrap(),
        );
        let split = Split::new(&prob, 3).unwrap();
        let v = DenseMatrix::from_rows(&[[1.5, 1.5, 1.5], [-1.5, -1.5, -1.5], [-3.5, 3.5, 0.5]]).unwrap();
        let (w, d) = split.prox(&v, 1.0);
        let want = DenseMatrix::from_rows(&[[0.5, 0.0, 0.5], [0.0, -0.5, -0.5], [-0.5, 0.5, 0.0]]).unwrap();
        assert!((&w - &want).max_abs() < 1e-15);
        assert_eq!(d.get(0, 1), 0.0);
        assert_eq!(d.get(2, 0), 1.0);
    }

    #[test]
    fn leading_eigenspace() {
        let a = DenseMatrix::from_diagonal(&[3f64.sqrt(), 2f64.sqrt(), 1.0, 0.0]);
        let prob = problem(ObjectiveSpec::sparse_trace(a, 0.0, 2), 1.0, SignPattern::free(2));
        let x0 = random_stiefel(&mut rng_from_seed(3), 4, 2).unwrap();
        let rep = solve_manpg(&prob, &x0, &ManpgSettings { tol: 1e-7, ..Default::default() }).unwrap();
        assert!(rep.converged, "{} {} {:?}", rep.iterations, rep.stationarity_measure, rep.objective_trace.last());
        assert!((rep.objective_trace.last().unwrap() + 5.0).abs() < 1e-8);
        assert!(rep.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn sign_penalty_alone_reaches_feasibility() {
        let prob = problem(
            ObjectiveSpec::Linear { c: DenseMatrix::zeros(5, 2) },
            1.0,
            SignPattern::nonnegative(2),
        );
        let x0 = random_stiefel(&mut rng_from_seed(11), 5, 2).unwrap();
        let rep = solve_manpg(&prob, &x0, &ManpgSettings::default()).unwrap();
        let last = rep.feasibility_trace.last().unwrap();
        assert!(last.sign_violation < 1e-6, "{last:?}");
        assert!(last.orth_violation < 1e-12);
    }

    #[test]
    fn rejects_unsupported_settings() {
        let obj = ObjectiveSpec::Linear { c: DenseMatrix::zeros(3, 1) };
        let x0 = DenseMatrix::identity(3, 1);
        let p2 = PenaltyProblem::new(obj.clone(), 1.0, 2.0, 1.0, 1.0, Domain::Stiefel, SignPattern::free(1)).unwrap();
        assert!(matches!(solve_manpg(&p2, &x0, &ManpgSettings::default()), Err(Error::Unsupported(_))));
        let full = PenaltyProblem { domain: Domain::FullSpace, p: 1.0, ..p2 };
        assert!(matches!(solve_manpg(&full, &x0, &ManpgSettings::default()), Err(Error::Unsupported(_))));
    }
}
