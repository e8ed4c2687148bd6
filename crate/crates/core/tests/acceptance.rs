//! Acceptance checks, one PASS/FAIL line per criterion. Runs as a plain
//! binary (`harness = false`) and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use stiefel_bound::bounds::{
    check_tightness, generate_divergence, run_sweep, PatternFamily, TightnessKind,
    TightnessSequence, SweepConfig,
};
use stiefel_bound::linalg::{polar_factor, sigma_gap, singular_values, spectral_norm};
use stiefel_bound::manifold::{rounding_matrix, SignPattern};
use stiefel_bound::oracle::{
    dist_nonneg_sphere, exact_project_nonneg_stiefel, nearest_permutation, nearest_permutation_exhaustive,
    EnumerationBudget,
};
use stiefel_bound::penalty::{
    counterexample_audit, exactness_audit, mu_threshold_global, non_exactness_audit, run_experiment,
    solve_manpg, standard_eps_grid, AuditTrials, BothTag, Domain, ExperimentConfig, ManpgSettings, Model,
    ModelSelection, ObjectiveSpec, PenaltyProblem,
};
use stiefel_bound::sampling::{child_seed, gaussian_matrix, random_stiefel, rng_from_seed, uniform_matrix};
use stiefel_bound::{Matrix, Result};

const SLACK: f64 = 1e-10;

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn bound_suite() -> Result<Outcome> {
    let start = Instant::now();
    let shapes = [(4, 1), (4, 2), (5, 3), (4, 4), (6, 2)];
    let (mut rows, mut failures, mut exact, mut worst) = (0usize, 0usize, 0usize, f64::INFINITY);
    let mut missing_exact = 0usize;
    for &(n, r) in &shapes {
        for family in PatternFamily::ALL {
            let cfg = SweepConfig { n, r, family, samples: 1000, seed: 1, budget: EnumerationBudget::default() };
            let exact_possible = cfg.budget.allows(n, r);
            for row in run_sweep(&cfg)? {
                rows += 1;
                if !row.passes() {
                    failures += 1;
                }
                if row.regime_ok {
                    worst = worst.min(row.margin);
                }
                if row.lhs_is_exact {
                    exact += 1;
                } else if exact_possible && family == PatternFamily::Nonneg {
                    missing_exact += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && missing_exact == 0 && secs < 300.0,
        format!("{rows} certificates, {failures} failing, {exact} with exact lhs, worst margin {worst:.3e}"),
    )
}

fn tightness() -> Result<Outcome> {
    let mut lower_ok = true;
    let mut min_step = f64::INFINITY;
    let mut parts = Vec::new();
    for kind in [TightnessKind::P5i, TightnessKind::P5ii, TightnessKind::P5iii] {
        let seq = TightnessSequence::standard(kind, 4, 2, 6)?;
        let reps = (0..6)
            .map(|k| check_tightness::<f64>(&seq, k, EnumerationBudget::default()))
            .collect::<Result<Vec<_>>>()?;
        lower_ok &= reps.iter().all(|r| r.lower_bound_holds && r.dist_is_exact);
        let step = reps.windows(2).map(|w| w[1].ratio_q06 / w[0].ratio_q06).fold(f64::INFINITY, f64::min);
        min_step = min_step.min(step);
        parts.push(format!("{kind} min step {step:.4}"));
    }
    outcome(
        lower_ok && min_step >= 1.2,
        format!("lower bounds {}, {}; ratio_q06 steps need >= 1.2", if lower_ok { "hold" } else { "violated" }, parts.join(", ")),
    )
}

fn divergence() -> Result<Outcome> {
    let n = 4;
    let ks = [1.0, 4.0, 25.0, 100.0];
    let mut identities = true;
    let mut monotone = true;
    for r in [1, n] {
        let rf = (r as f64).sqrt();
        let mut ratios = Vec::new();
        for &k in &ks {
            let x: Matrix = generate_divergence(n, r, k)?;
            let gap = sigma_gap(&x)?;
            let gram = x.gram_residual().frobenius_norm();
            identities &= (gap - (k.sqrt() - 1.0) * rf).abs() <= 1e-10;
            identities &= (gram - (k - 1.0) * rf).abs() <= 1e-10;
            if k > 1.0 {
                let dist = exact_project_nonneg_stiefel(&x, EnumerationBudget::default())?.1;
                ratios.push(dist / gram.powf(0.4));
            }
        }
        // at k = 1 the point is feasible and the ratio is 0/0
        monotone &= ratios.windows(2).all(|w| w[1] > w[0]);
    }
    outcome(identities && monotone, format!("sigma/Gram identities {identities}, q=0.4 ratio increasing over k>=4 {monotone}"))
}

fn counterexample() -> Result<Outcome> {
    let rep = counterexample_audit()?;
    outcome(
        rep.passes,
        format!("f(X*) = {:.16e}, f(X_hat) = {:.16e}, orth error {:.1e}", rep.f_star, rep.f_hat, rep.hat_orth_error),
    )
}

fn oracle_cross_check() -> Result<Outcome> {
    let mut perm_mismatch = 0;
    for i in 0..200 {
        let x: Matrix = uniform_matrix(&mut rng_from_seed(child_seed(5, i)), 5, 5, -1.0, 1.0);
        let (p, d) = nearest_permutation(&x)?;
        let (pe, de) = nearest_permutation_exhaustive(&x)?;
        if x.inner(&p) != x.inner(&pe) || d != de {
            perm_mismatch += 1;
        }
    }
    let mut worst = 0f64;
    for i in 0..200 {
        let mut rng = rng_from_seed(child_seed(6, i));
        // every fourth vector is entirely nonpositive
        let (lo, hi) = if i % 4 == 0 { (-1.0, 0.0) } else { (-1.0, 1.0) };
        let x: Matrix = uniform_matrix(&mut rng, 5, 1, lo, hi);
        let exact = exact_project_nonneg_stiefel(&x, EnumerationBudget::default())?.1;
        worst = worst.max((dist_nonneg_sphere(x.column(0)) - exact).abs());
    }
    outcome(
        perm_mismatch == 0 && worst <= 1e-12,
        format!("permutation mismatches {perm_mismatch}/200, sphere max deviation {worst:.2e}"),
    )
}

fn positive_audit() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    let c1 = Matrix::from_rows(&[[1.0], [-2.0], [0.0], [1.0], [3.0]])?;
    let c4: Matrix = uniform_matrix(&mut rng_from_seed(5), 4, 4, -1.0, 1.0);
    for (label, c) in [("r=1", c1), ("r=n=4", c4)] {
        let (n, r) = c.shape();
        let mu = 1.1 * mu_threshold_global(c.frobenius_norm(), n, r, 2.0);
        let prob = PenaltyProblem::new(
            ObjectiveSpec::Linear { c },
            mu,
            2.0,
            0.5,
            0.5,
            Domain::FullSpace,
            SignPattern::nonnegative(r),
        )?;
        let rep = exactness_audit(&prob, n, &AuditTrials::default(), EnumerationBudget::default())?;
        pass &= rep.passes;
        parts.push(format!("{label}: mu {mu:.3}, worst margin {:+.2e}", rep.worst_margin));
    }
    outcome(pass, parts.join("; "))
}

fn non_exactness() -> Result<Outcome> {
    let rep = non_exactness_audit(
        4,
        2,
        &[0.6, 0.75, 1.0],
        &[1.0, 10.0, 100.0, 1000.0],
        &standard_eps_grid(),
        EnumerationBudget::default(),
    )?;
    let missing: Vec<String> = rep
        .pairs
        .iter()
        .filter(|p| p.violating_eps.is_none())
        .map(|p| format!("(q2 {}, mu {}) best margin {:.2e}", p.q2, p.mu, p.best_margin))
        .collect();
    let detail = if missing.is_empty() {
        format!("all {} pairs violated", rep.pairs.len())
    } else {
        format!("{}/{} pairs violated; no violation on the grid for {}", rep.pairs.len() - missing.len(), rep.pairs.len(), missing.join(", "))
    };
    outcome(rep.all_violated(), detail)
}

fn eigen_solver() -> Result<Outcome> {
    let a = Matrix::from_diagonal(&[3f64.sqrt(), 2f64.sqrt(), 1.0, 0.0]);
    let prob = PenaltyProblem::new(
        ObjectiveSpec::sparse_trace(a, 0.0, 2),
        1.0,
        1.0,
        1.0,
        1.0,
        Domain::Stiefel,
        SignPattern::free(2),
    )?;
    let x0 = random_stiefel(&mut rng_from_seed(8), 4, 2)?;
    let rep = solve_manpg(&prob, &x0, &ManpgSettings { tol: 1e-7, ..Default::default() })?;
    let f = *rep.objective_trace.last().expect("nonempty trace");
    let feas = rep.final_point.gram_residual().frobenius_norm();
    outcome(
        (f + 5.0).abs() <= 1e-6 && feas <= 1e-8 && rep.iterations <= 500,
        format!("objective {f:.12}, feasibility {feas:.1e}, {} iterations", rep.iterations),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

fn sparse_pca() -> Result<Outcome> {
    let cfg = ExperimentConfig {
        m: 40,
        n: 30,
        r: 10,
        lambda: 0.6,
        mu: 150.0,
        p: 1.0,
        q1: 1.0,
        q2: 0.5,
        model: ModelSelection::Both(BothTag::Both),
        seeds: (0..20).collect(),
        max_iters: 500,
        tol: 1e-6,
    };
    let rows = run_experiment(&cfg)?;
    let pick = |m: Model, f: fn(&stiefel_bound::penalty::ExperimentRow) -> f64| {
        median(rows.iter().filter(|r| r.model == m).map(f).collect())
    };
    let (rre_t, rre_p) = (pick(Model::Trace, |r| r.rre), pick(Model::TraceP, |r| r.rre));
    let (pev_t, pev_p) = (pick(Model::Trace, |r| r.pev), pick(Model::TraceP, |r| r.pev));
    let identity = rows.iter().all(|r| (r.rre * r.rre + r.pev - 1.0).abs() <= 1e-6);
    let in_band = [rre_t, rre_p].iter().all(|v| (0.30..=0.55).contains(v));
    outcome(
        rre_p <= rre_t && in_band && pev_p >= pev_t && identity,
        format!(
            "median RRE trace {rre_t:.5} traceP {rre_p:.5}, median PEV trace {pev_t:.5} traceP {pev_p:.5}, RRE^2+PEV=1 {identity}"
        ),
    )
}

fn sorted_desc(x: &Matrix) -> Result<Vec<f64>> {
    let mut s = singular_values(x)?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

fn shape(rng_seed: u64) -> (usize, usize) {
    let u: Matrix = uniform_matrix(&mut rng_from_seed(rng_seed), 1, 2, 0.0, 1.0);
    let n = 1 + (u.get(0, 0) * 6.0) as usize;
    let r = 1 + (u.get(0, 1) * n as f64) as usize;
    (n.min(6), r.min(n))
}

fn property_suites() -> Result<Outcome> {
    let mut violations = [0usize; 4];

    for i in 0..10_000u64 {
        let (n, r) = shape(child_seed(100, i));
        let mut rng = rng_from_seed(child_seed(101, i));
        let x: Matrix = gaussian_matrix(&mut rng, n, r);
        let y: Matrix = gaussian_matrix(&mut rng, n, r);
        let (sx, sy) = (sorted_desc(&x)?, sorted_desc(&y)?);
        let diff: f64 = sx.iter().zip(&sy).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let trace_bound: f64 = sx.iter().zip(&sy).map(|(a, b)| a * b).sum();
        if diff > (&x - &y).frobenius_norm() + SLACK || x.inner(&y) > trace_bound + SLACK {
            violations[0] += 1;
        }
    }

    for i in 0..10_000u64 {
        let (n, r) = shape(child_seed(200, i));
        let mut rng = rng_from_seed(child_seed(201, i));
        let scale = [0.05, 0.5, 2.0][i as usize % 3];
        let x: Matrix = uniform_matrix(&mut rng, n, r, -scale, scale);
        let x = &polar_factor(&gaussian_matrix(&mut rng, n, r))? + &x;
        let gap = sigma_gap(&x)?;
        let dist = (&x - &polar_factor(&x)?).frobenius_norm();
        let gram = x.gram_residual().frobenius_norm();
        let bound = gram.min((r as f64).powf(0.25) * gram.sqrt());
        if (dist - gap).abs() > SLACK || gap > bound + SLACK || gram > (spectral_norm(&x)? + 1.0) * gap + SLACK {
            violations[1] += 1;
        }
    }

    for i in 0..1000u64 {
        let (n, r) = shape(child_seed(300, i));
        let mut rng = rng_from_seed(child_seed(301, i));
        let hi = [0.3, 1.0, 2.0][i as usize % 3];
        let x: Matrix = uniform_matrix(&mut rng, n, r, 0.0, hi);
        let y = rounding_matrix(&x)?;
        let z = x.gram_residual();
        let gy = y.gram();
        let diagonal = (0..r).all(|a| (0..r).all(|b| a == b || gy.get(a, b) == 0.0));
        let ok = diagonal
            && (0..r).all(|j| {
                let z1: f64 = z.column(j).iter().map(|v| v.abs()).sum::<f64>().sqrt();
                let dx: f64 = x.column(j).iter().zip(y.column(j)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let ny: f64 = y.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
                dx <= z1 + SLACK && (ny - 1.0).abs() <= z1 + SLACK
            });
        if !ok {
            violations[2] += 1;
        }
    }

    for i in 0..10_000u64 {
        let (n, r) = shape(child_seed(400, i));
        let x: Matrix = gaussian_matrix(&mut rng_from_seed(child_seed(401, i)), n, r);
        let fro = x.frobenius_norm();
        for p in [1.0, 1.5, 2.0, 3.0, 10.0] {
            let c = 1f64.max(((n * r) as f64).powf((p - 2.0) / (2.0 * p)));
            if fro > c * x.entrywise_norm(p) + SLACK {
                violations[3] += 1;
            }
        }
    }

    outcome(
        violations.iter().all(|&v| v == 0),
        format!(
            "violations: singular values {}, distance chain {}, rounding {}, norm comparison {}",
            violations[0], violations[1], violations[2], violations[3]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("theorem-bound suite", bound_suite),
        ("tightness sequences", tightness),
        ("exponent divergence", divergence),
        ("counterexample audit", counterexample),
        ("oracle cross-validation", oracle_cross_check),
        ("exact penalty positive audit", positive_audit),
        ("non-exactness audit", non_exactness),
        ("solver sanity", eigen_solver),
        ("sparse PCA directional replication", sparse_pca),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {detail} [{:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
