use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stiefel_bound::bounds::{
    check_tightness, run_sweep, CertificateRow, PatternFamily, SweepConfig, TightnessKind, TightnessSequence,
};
use stiefel_bound::io::parse_matrix;
use stiefel_bound::manifold::{frobenius_residual, nearest_sign_stiefel_upper, SignPattern};
use stiefel_bound::oracle::{exact_project_nonneg_stiefel, nearest_permutation, EnumerationBudget};
use stiefel_bound::penalty::{counterexample_audit, run_experiment, ExperimentConfig, ExperimentRow};
use stiefel_bound::Error;

const THREADS_ENV: &str = "STIEFEL_BOUND_THREADS";

/// The verification shapes used when `--nr` is not given.
const DEFAULT_SHAPES: [(usize, usize); 5] = [(4, 1), (4, 2), (5, 3), (4, 4), (6, 2)];

#[derive(Parser, Debug)]
#[command(name = "stiefel-bound", version, about = "Error bound certificates and exact penalty audits for sign-constrained Stiefel manifolds")]
struct Cli {
    /// Base seed; fixes every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Largest number of support patterns the exact oracle may enumerate.
    #[arg(long, global = true, default_value_t = EnumerationBudget::DEFAULT_MAX)]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Bounds,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Nonneg,
    Free,
    First,
    Mixed,
    All,
}

impl FamilyArg {
    fn families(self) -> Vec<PatternFamily> {
        match self {
            FamilyArg::Nonneg => vec![PatternFamily::Nonneg],
            FamilyArg::Free => vec![PatternFamily::Free],
            FamilyArg::First => vec![PatternFamily::First],
            FamilyArg::Mixed => vec![PatternFamily::Mixed],
            FamilyArg::All => PatternFamily::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify every applicable error bound on seeded samples.
    Verify {
        #[arg(long, value_enum, default_value = "bounds")]
        suite: Suite,
        /// Shape as `NxR`; repeatable. Defaults to 4x1, 4x2, 5x3, 4x4, 6x2.
        #[arg(long, value_parser = parse_shape)]
        nr: Vec<(usize, usize)>,
        #[arg(long, value_enum, default_value = "all")]
        family: FamilyArg,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Distance-to-residual ratios along a sequence approaching the feasible set.
    Tightness {
        /// P5i, P5ii, P5iii or divergence.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0.4)]
        eps_start: f64,
        #[arg(long, default_value_t = 6)]
        steps: usize,
        /// Scale factors for the divergence sequence.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 4.0, 25.0, 100.0])]
        scales: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
    /// Exact and constructive distances of a matrix read from a file.
    OracleCheck {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Sparse PCA penalty experiment from a TOML or JSON config.
    Penalty {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate the two points of the linear counterexample.
    Counterexample,
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (n, r) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxR, got {s:?}"))?;
    let n: usize = n.parse().map_err(|_| format!("bad n in {s:?}"))?;
    let r: usize = r.parse().map_err(|_| format!("bad r in {s:?}"))?;
    if r == 0 || r > n {
        return Err(format!("need 1 <= r <= n, got {s:?}"));
    }
    Ok((n, r))
}

enum Failure {
    /// Bad arguments or config: exit 2.
    Usage(String),
    /// A check failed or the computation errored: exit 1.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

struct Output {
    text: String,
    failures: Vec<String>,
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Check(format!("stdout: {e}")))
        }
    }
}

fn verify(cli: &Cli, shapes: &[(usize, usize)], family: FamilyArg, samples: usize) -> Result<Output, Failure> {
    let shapes = if shapes.is_empty() { DEFAULT_SHAPES.to_vec() } else { shapes.to_vec() };
    let budget = EnumerationBudget::new(cli.budget);
    let mut text = format!("{}\n", CertificateRow::HEADER);
    let mut failures = Vec::new();
    for &(n, r) in &shapes {
        for fam in family.families() {
            let cfg = SweepConfig { n, r, family: fam, samples, seed: cli.seed, budget };
            for row in run_sweep(&cfg)? {
                let line = row.to_csv();
                if !row.passes() {
                    failures.push(line.clone());
                }
                text.push_str(&line);
                text.push('\n');
            }
        }
    }
    Ok(Output { text, failures })
}

fn tightness(cli: &Cli, kind: &str, eps_start: f64, steps: usize, scales: &[f64], n: usize, r: usize) -> Result<Output, Failure> {
    let kind: TightnessKind = kind.parse()?;
    let seq = if kind == TightnessKind::Divergence {
        let seq = TightnessSequence { kind, n, r, epsilons: scales.to_vec() };
        seq.validate()?;
        seq
    } else {
        TightnessSequence::halving(kind, n, r, eps_start, steps)?
    };
    let budget = EnumerationBudget::new(cli.budget);
    let mut text = String::from("k,eps,dist,residual,ratio_q05,ratio_q06\n");
    let mut failures = Vec::new();
    for k in 0..seq.epsilons.len() {
        let rep = check_tightness::<f64>(&seq, k, budget)?;
        let line = format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            rep.k, rep.eps, rep.dist, rep.residual, rep.ratio_q05, rep.ratio_q06
        );
        if !rep.lower_bound_holds {
            failures.push(format!("{line} (distance below {:.16e})", rep.stated_lower));
        }
        text.push_str(&line);
        text.push('\n');
    }
    Ok(Output { text, failures })
}

fn oracle_check(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let src = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let x = parse_matrix(&src)?;
    let (n, r) = x.shape();
    if r > n {
        return Err(Failure::Usage(format!("need rows >= cols, got {n}x{r}")));
    }
    let pattern = SignPattern::nonnegative(r);
    let budget = EnumerationBudget::new(cli.budget);
    let res = frobenius_residual(&x, &pattern)?;
    let mut text = String::from("quantity,value,note\n");
    let mut row = |name: &str, v: Option<f64>, note: &str| {
        let v = v.map_or(String::new(), |v| format!("{v:.16e}"));
        text.push_str(&format!("{name},{v},{note}\n"));
    };
    row("sign_violation", Some(res.sign_violation), "");
    row("orth_violation", Some(res.orth_violation), "");
    row("sigma_gap", Some(res.sigma_gap), "");
    match exact_project_nonneg_stiefel(&x, budget) {
        Ok((_, d)) => row("exact_dist", Some(d), "enumeration"),
        Err(Error::BudgetExceeded { required, .. }) => {
            row("exact_dist", None, &format!("budget_exceeded ({required} patterns)"))
        }
        Err(e) => return Err(e.into()),
    }
    let (_, upper) = nearest_sign_stiefel_upper(&x, &pattern)?;
    row("constructive_dist", Some(upper), "upper bound");
    if n == r {
        let (_, d) = nearest_permutation(&x)?;
        row("permutation_dist", Some(d), "assignment");
    }
    Ok(Output { text, failures: Vec::new() })
}

fn read_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let src = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let cfg: ExperimentConfig = if is_json {
        serde_json::from_str(&src).map_err(|e| Failure::Usage(format!("bad config: {e}")))?
    } else {
        toml::from_str(&src).map_err(|e| Failure::Usage(format!("bad config: {e}")))?
    };
    cfg.validate()?;
    Ok(cfg)
}

fn penalty(path: &Path) -> Result<Output, Failure> {
    let cfg = read_config(path)?;
    let mut text = format!("{}\n", ExperimentRow::HEADER);
    for row in run_experiment(&cfg)? {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    Ok(Output { text, failures: Vec::new() })
}

fn counterexample() -> Result<Output, Failure> {
    let rep = counterexample_audit()?;
    let text = format!(
        "f(X*) = {:.16e}\nf(X_hat) = {:.16e}\n|X_hat^T X_hat - I|_F = {:.3e}\nmin f over the feasible set = {:.16e}\nf(X_hat) < f(X*): {}\n",
        rep.f_star,
        rep.f_hat,
        rep.hat_orth_error,
        rep.constrained_min,
        rep.f_hat < rep.f_star
    );
    let failures = if rep.passes { Vec::new() } else { vec!["counterexample checks failed".to_string()] };
    Ok(Output { text, failures })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Check(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Verify { suite: Suite::Bounds, nr, family, samples } => verify(cli, nr, *family, *samples),
        Command::Tightness { kind, eps_start, steps, scales, n, r } => {
            tightness(cli, kind, *eps_start, *steps, scales, *n, *r)
        }
        Command::OracleCheck { matrix } => oracle_check(cli, matrix),
        Command::Penalty { config } => penalty(config),
        Command::Counterexample => counterexample(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        emit(cli.output.as_deref(), &out.text)?;
        Ok(out.failures)
    });
    match result {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{} failing row(s):", failures.len());
            for f in &failures {
                eprintln!("{f}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
