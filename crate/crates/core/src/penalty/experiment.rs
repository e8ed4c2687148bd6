use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use super::manpg::{solve_manpg, ManpgSettings};
use super::metrics::reconstruction_metrics;
use super::objective::ObjectiveSpec;
use super::problem::{Domain, PenaltyProblem};
use crate::error::{invalid, Error, Result};
use crate::linalg::DenseMatrix;
use crate::manifold::{frobenius_residual, SignPattern};
use crate::sampling::{child_seed, random_stiefel, rng_from_seed, uniform_matrix};

/// Sparse PCA model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
pub enum Model {
    /// `−tr(XᵀAᵀAX) + λ‖X‖_{ℓ1}` on the Stiefel manifold.
    #[serde(rename = "trace")]
    Trace,
    /// First column kept nonnegative by a penalty and left out of the
    /// `ℓ1` term.
    #[serde(rename = "traceP")]
    TraceP,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Trace => "trace",
            Model::TraceP => "traceP",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trace" => Ok(Model::Trace),
            "traceP" => Ok(Model::TraceP),
            _ => invalid(format!("unknown model {s:?}")),
        }
    }
}

/// `model` in a config file: one model or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum ModelSelection {
    One(Model),
    Both(BothTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum BothTag {
    #[serde(rename = "both")]
    Both,
}

impl ModelSelection {
    pub fn models(self) -> Vec<Model> {
        match self {
            ModelSelection::One(m) => vec![m],
            ModelSelection::Both(_) => vec![Model::Trace, Model::TraceP],
        }
    }
}

fn default_p() -> f64 {
    1.0
}
fn default_q1() -> f64 {
    1.0
}
fn default_q2() -> f64 {
    0.5
}
fn default_max_iters() -> usize {
    500
}
fn default_tol() -> f64 {
    1e-6
}
fn default_model() -> ModelSelection {
    ModelSelection::Both(BothTag::Both)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub lambda: f64,
    pub mu: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_q1")]
    pub q1: f64,
    #[serde(default = "default_q2")]
    pub q2: f64,
    #[serde(default = "default_model")]
    pub model: ModelSelection,
    pub seeds: Vec<u64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.r == 0 || self.r > self.n {
            return invalid(format!("need m, n >= 1 and 1 <= r <= n, got m = {}, n = {}, r = {}", self.m, self.n, self.r));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return invalid(format!("lambda must be nonnegative, got {}", self.lambda));
        }
        if self.seeds.is_empty() {
            return invalid("no seeds given");
        }
        if !(self.tol > 0.0) {
            return invalid(format!("tol must be positive, got {}", self.tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub model: Model,
    pub seed: u64,
    pub rre: f64,
    pub pev: f64,
    pub final_objective: f64,
    pub iterations: usize,
    /// Largest of the sign and Gram violations (Frobenius) at the final
    /// point, for the model's own sign pattern.
    pub feasibility: f64,
}

impl ExperimentRow {
    pub const HEADER: &'static str = "model,seed,rre,pev,final_objective,iterations,feasibility";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            self.model, self.seed, self.rre, self.pev, self.final_objective, self.iterations, self.feasibility
        )
    }
}

/// `m x n` matrix with entries uniform on `[0, 1]` and unit columns.
pub fn synthetic_data(seed: u64, m: usize, n: usize) -> DenseMatrix<f64> {
    let mut rng = rng_from_seed(child_seed(seed, 0));
    let a: DenseMatrix<f64> = uniform_matrix(&mut rng, m, n, 0.0, 1.0);
    DenseMatrix::from_fn(m, n, |i, j| {
        let nrm = crate::linalg::norm2(a.column(j));
        if nrm > 0.0 {
            a.get(i, j) / nrm
        } else {
            0.0
        }
    })
}

/// Random point of `St^{n,r}` shared by both models for a given seed.
pub fn random_start(seed: u64, n: usize, r: usize) -> Result<DenseMatrix<f64>> {
    random_stiefel(&mut rng_from_seed(child_seed(seed, 1)), n, r)
}

pub fn model_problem(cfg: &ExperimentConfig, model: Model, a: DenseMatrix<f64>) -> Result<PenaltyProblem<f64>> {
    let (n, r) = (cfg.n, cfg.r);
    let (weights, pattern) = match model {
        Model::Trace => (DenseMatrix::from_fn(n, r, |_, _| 1.0), SignPattern::free(r)),
        Model::TraceP => (
            DenseMatrix::from_fn(n, r, |_, j| if j == 0 { 0.0 } else { 1.0 }),
            SignPattern::new(r, &[0], &[])?,
        ),
    };
    PenaltyProblem::new(
        ObjectiveSpec::SparseTrace { a, lambda: cfg.lambda, weights },
        cfg.mu,
        cfg.p,
        cfg.q1,
        cfg.q2,
        Domain::Stiefel,
        pattern,
    )
}

fn run_one(cfg: &ExperimentConfig, model: Model, seed: u64) -> Result<ExperimentRow> {
    let a = synthetic_data(seed, cfg.m, cfg.n);
    let x0 = random_start(seed, cfg.n, cfg.r)?;
    let prob = model_problem(cfg, model, a.clone())?;
    let settings = ManpgSettings { max_iters: cfg.max_iters, tol: cfg.tol, ..Default::default() };
    let rep = solve_manpg(&prob, &x0, &settings)?;
    let x = &rep.final_point;
    let metrics = reconstruction_metrics(&a, x)?;
    let res = frobenius_residual(x, &prob.pattern)?;
    Ok(ExperimentRow {
        model,
        seed,
        rre: metrics.rre,
        pev: metrics.pev,
        final_objective: *rep.objective_trace.last().expect("trace holds the start value"),
        iterations: rep.iterations,
        feasibility: res.sign_violation.max(res.orth_violation),
    })
}

/// One row per model and seed, ordered by model then seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate()?;
    let jobs: Vec<(Model, u64)> =
        cfg.model.models().into_iter().flat_map(|m| cfg.seeds.iter().map(move |&s| (m, s))).collect();
    jobs.par_iter().map(|&(m, s)| run_one(cfg, m, s)).collect()
}
