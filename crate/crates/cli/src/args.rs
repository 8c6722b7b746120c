use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use kaczmarz_core::gen::InstanceKind;
use kaczmarz_core::solvers::DEFAULT_EPS;
use kaczmarz_core::SolverKind;

#[derive(Debug, Parser)]
#[command(name = "kaczmarz", version, about = "Randomized Kaczmarz solvers for least-squares problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance and write it as Matrix Market files
    Gen(GenArgs),
    /// Solve a system read from Matrix Market files
    Solve(SolveArgs),
    /// Run a benchmark sweep and write one CSV row per run
    Bench(BenchArgs),
    /// Check the convergence theorems on one instance
    Verify(VerifyArgs),
}

fn parse_eps(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 2.0 {
        Ok(v)
    } else {
        Err(format!("eps must lie in (0, 2), got {v}"))
    }
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("delta must lie in (0, 1), got {v}"))
    }
}

fn parse_positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(format!("{e}")),
    }
}

/// Shape-independent generator settings.
#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    /// Instance ensemble
    #[arg(long, default_value = "sparse")]
    pub kind: InstanceKind,
    /// Fraction of nonzeros (sparse ensemble)
    #[arg(long, default_value_t = 0.25)]
    pub density: f64,
    /// Target σ_max²/σ_min² (illcond ensemble)
    #[arg(long, default_value_t = 1e6)]
    pub cond: f64,
    /// Build b in the column space of A
    #[arg(long, default_value_t = false, action = ArgAction::Set)]
    pub consistent: bool,
    /// Standard deviation of Gaussian noise added to a consistent b
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Draw a matrix of this rank (dense ensemble)
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveOptions {
    #[arg(long, default_value = "rek")]
    pub solver: SolverKind,
    #[arg(long, default_value_t = DEFAULT_EPS, value_parser = parse_eps)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration cap (default: 2·T* when the oracle runs, else 10⁶·min(m, n))
    #[arg(long, value_parser = parse_positive)]
    pub max_iters: Option<u64>,
    /// Iterations between convergence checks (default: 8·min(m, n))
    #[arg(long, value_parser = parse_positive)]
    pub check_interval: Option<u64>,
    /// Failure probability used for T*
    #[arg(long, default_value_t = 0.1, value_parser = parse_delta)]
    pub delta: f64,
    /// Skip the dense reference solution above this dimension
    #[arg(long, default_value_t = 2000)]
    pub oracle_cap: usize,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path for A
    #[arg(long)]
    pub matrix: PathBuf,
    /// Output path for b
    #[arg(long)]
    pub rhs: PathBuf,
    /// Output path for the planted solution (consistent instances)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
    #[command(flatten)]
    pub opts: SolveOptions,
    /// Write x (z for rop) as a Matrix Market array
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Row counts, comma separated
    #[arg(long, value_delimiter = ',', default_value = "500")]
    pub m: Vec<usize>,
    /// Column counts, comma separated
    #[arg(long, value_delimiter = ',', default_value = "200")]
    pub n: Vec<usize>,
    /// Solvers to run on every instance, comma separated
    #[arg(long, value_delimiter = ',', default_value = "rek")]
    pub solver: Vec<SolverKind>,
    #[arg(long, default_value_t = DEFAULT_EPS, value_parser = parse_eps)]
    pub eps: f64,
    /// Base seed; repetition r uses seed + r
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10, value_parser = parse_positive)]
    pub reps: u64,
    #[arg(long, value_parser = parse_positive)]
    pub max_iters: Option<u64>,
    #[arg(long, value_parser = parse_positive)]
    pub check_interval: Option<u64>,
    #[arg(long, default_value_t = 0.1, value_parser = parse_delta)]
    pub delta: f64,
    #[arg(long, default_value_t = 2000)]
    pub oracle_cap: usize,
    /// Benchmark a fixed system instead of generated ones (needs --rhs)
    #[arg(long, requires = "rhs")]
    pub matrix: Option<PathBuf>,
    #[arg(long, requires = "matrix")]
    pub rhs: Option<PathBuf>,
    /// Output CSV (default: stdout)
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, requires = "matrix")]
    pub rhs: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8, value_parser = parse_eps)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1, value_parser = parse_delta)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte-Carlo repetitions
    #[arg(long, default_value_t = 200, value_parser = parse_positive)]
    pub reps: u64,
    #[arg(long, value_parser = parse_positive)]
    pub check_interval: Option<u64>,
    #[arg(long, default_value_t = 2000)]
    pub oracle_cap: usize,
    /// Multiplier on the expectation envelopes
    #[arg(long, default_value_t = 1.5, hide = true)]
    pub envelope_slack: f64,
}
