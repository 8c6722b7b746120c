//! Command-line front end: `gen`, `solve`, `bench` and `verify`.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a solve hits
//! its iteration cap or a verification check fails.

use std::ffi::OsString;

use clap::Parser;
use kaczmarz_core::gen::{generate, Instance, InstanceSpec};
use kaczmarz_core::reference::{reference_for, ReferenceSolution, DENSE_CAP};
use kaczmarz_core::DualSparseMatrix;

pub mod args;
mod bench;
mod gen;
mod solve;
mod verify;

use args::{Cli, Command, EnsembleArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNSOLVED: i32 = 2;

pub type CmdResult = Result<i32, Box<dyn std::error::Error + Send + Sync>>;

/// Parses `args` and runs the selected subcommand, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("KACZMARZ_LOG", "error"))
        .format_timestamp(None)
        .try_init();

    let result = match cli.command {
        Command::Gen(a) => gen::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

pub(crate) fn instance_spec(e: &EnsembleArgs, m: usize, n: usize, seed: u64) -> InstanceSpec {
    let mut spec = InstanceSpec::new(e.kind, m, n, seed);
    spec.density = e.density;
    spec.cond_target = e.cond;
    spec.consistent = e.consistent;
    spec.noise_scale = e.noise;
    spec.rank = e.rank;
    spec
}

pub(crate) fn build_instance(e: &EnsembleArgs, m: usize, n: usize, seed: u64) -> kaczmarz_core::Result<Instance> {
    generate(&instance_spec(e, m, n, seed))
}

/// Reference solution when the instance is within the oracle cap.
pub(crate) fn oracle(a: &DualSparseMatrix, b: &[f64], cap: usize) -> kaczmarz_core::Result<Option<ReferenceSolution>> {
    if a.rows().max(a.cols()) > cap || a.rows() * a.cols() > DENSE_CAP {
        log::info!("oracle skipped for {}x{}", a.rows(), a.cols());
        return Ok(None);
    }
    reference_for(a, b).map(Some)
}
