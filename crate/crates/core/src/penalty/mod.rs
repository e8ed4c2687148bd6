//! Penalised problems over the sign-constrained Stiefel manifold: objective
//! specs, penalty thresholds, a manifold proximal gradient solver and
//! audits of the exact penalty property.

mod audit;
mod experiment;
mod manpg;
mod metrics;
mod objective;
mod problem;

pub use audit::{
    counterexample_audit, exactness_audit, non_exactness_audit, standard_eps_grid, AuditTrials,
    CounterexampleReport, NonExactnessReport, NonExactnessRow, PairOutcome, PositiveAuditReport,
};
pub use experiment::{
    model_problem, random_start, run_experiment, synthetic_data, BothTag, ExperimentConfig,
    ExperimentRow, Model, ModelSelection,
};
pub use manpg::{solve_manpg, ManpgSettings, SolveReport};
pub use metrics::{reconstruction_metrics, ReconstructionMetrics, MAX_GRAM_CONDITION};
pub use objective::{CustomObjective, ObjectiveFn, ObjectiveSpec};
pub use problem::{
    mu_threshold_global, mu_threshold_local, penalty_value, Domain, PenaltyProblem, STIEFEL_DOMAIN_TOL,
};
