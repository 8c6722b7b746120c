use std::io::stdout;

use rayon::prelude::*;

use kaczmarz_core::gen::Instance;
use kaczmarz_core::io::{read_matrix_market, read_vector, write_csv, write_csv_to, BenchRecord};
use kaczmarz_core::matrix::{dist, norm};
use kaczmarz_core::solvers::theory_bounds;
use kaczmarz_core::{run as solve, ReferenceSolution, SolverConfig, SolverKind};

use crate::args::BenchArgs;
use crate::{build_instance, oracle, CmdResult, EXIT_OK};

struct Job {
    m: usize,
    n: usize,
    rep: u64,
}

pub fn run(args: BenchArgs) -> CmdResult {
    let fixed = match (&args.matrix, &args.rhs) {
        (Some(mp), Some(rp)) => {
            let a = read_matrix_market(mp)?.into_dual()?;
            let b = read_vector(rp)?;
            let id = mp.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let reference = oracle(&a, &b, args.oracle_cap)?;
            Some((id, Instance { a, b, planted: None }, reference))
        }
        _ => None,
    };
    if fixed.is_none() {
        // Reject bad ensemble settings before spending time on the sweep.
        crate::instance_spec(&args.ensemble, args.m[0], args.n[0], args.seed).validate()?;
    }

    let mut jobs = Vec::new();
    match &fixed {
        Some((_, inst, _)) => {
            for rep in 0..args.reps {
                jobs.push(Job { m: inst.a.rows(), n: inst.a.cols(), rep });
            }
        }
        None => {
            for &m in &args.m {
                for &n in &args.n {
                    for rep in 0..args.reps {
                        jobs.push(Job { m, n, rep });
                    }
                }
            }
        }
    }
    log::info!("bench: {} runs of {} solver(s)", jobs.len(), args.solver.len());

    // `collect` keeps sweep order whatever order the workers finish in.
    let rows: Vec<Vec<BenchRecord>> = jobs
        .par_iter()
        .map(|job| {
            let seed = args.seed.wrapping_add(job.rep);
            match &fixed {
                Some((id, inst, reference)) => run_solvers(&args, id, inst, reference.as_ref(), seed),
                None => {
                    let id = format!("{}-{}x{}-{}", args.ensemble.kind, job.m, job.n, seed);
                    match build_instance(&args.ensemble, job.m, job.n, seed) {
                        Ok(inst) => {
                            let reference = oracle(&inst.a, &inst.b, args.oracle_cap).unwrap_or_else(|e| {
                                log::error!("{id}: oracle failed: {e}");
                                None
                            });
                            run_solvers(&args, &id, &inst, reference.as_ref(), seed)
                        }
                        Err(e) => {
                            log::error!("{id}: generation failed: {e}");
                            args.solver.iter().map(|&s| failed(&id, s, job.m, job.n, 0, args.eps, seed)).collect()
                        }
                    }
                }
            }
        })
        .collect();
    let records: Vec<BenchRecord> = rows.into_iter().flatten().collect();

    match &args.csv {
        Some(path) => {
            write_csv(&records, path)?;
            eprintln!("wrote {} rows to {}", records.len(), path.display());
        }
        None => write_csv_to(&records, stdout().lock())?,
    }
    Ok(EXIT_OK)
}

fn run_solvers(
    args: &BenchArgs,
    id: &str,
    inst: &Instance,
    reference: Option<&ReferenceSolution>,
    seed: u64,
) -> Vec<BenchRecord> {
    let (m, n, nnz) = (inst.a.rows(), inst.a.cols(), inst.a.nnz());
    let bounds = reference.and_then(|r| theory_bounds(r, args.eps, args.delta).ok());
    args.solver
        .iter()
        .map(|&solver| {
            let mut cfg = SolverConfig {
                eps: args.eps,
                max_iters: args.max_iters,
                check_interval: args.check_interval,
                seed,
                solver,
                use_updated_z: false,
            };
            if cfg.max_iters.is_none() {
                if let Some(t) = &bounds {
                    cfg = cfg.with_bounds_cap(t);
                }
            }
            match solve(&inst.a, &inst.b, &cfg) {
                Ok(rep) => {
                    let forward_err = match reference {
                        Some(r) if solver != SolverKind::Rop => {
                            let xn = norm(&rep.x);
                            let err = dist(&rep.x, &r.x_ls);
                            if xn > 0.0 {
                                Some(err / xn)
                            } else if err == 0.0 {
                                Some(0.0)
                            } else {
                                None
                            }
                        }
                        _ => None,
                    };
                    BenchRecord {
                        instance: id.to_string(),
                        solver: solver.to_string(),
                        m,
                        n,
                        nnz,
                        eps: args.eps,
                        seed,
                        iters: rep.iters,
                        flops: rep.flops,
                        wall_time: rep.wall_time,
                        residual_norm: rep.residual_norm,
                        atz_norm: rep.atz_norm,
                        forward_err,
                        converged: rep.converged(),
                    }
                }
                Err(e) => {
                    log::error!("{id}: {solver} failed: {e}");
                    failed(id, solver, m, n, nnz, args.eps, seed)
                }
            }
        })
        .collect()
}

fn failed(id: &str, solver: SolverKind, m: usize, n: usize, nnz: usize, eps: f64, seed: u64) -> BenchRecord {
    BenchRecord {
        instance: id.to_string(),
        solver: solver.to_string(),
        m,
        n,
        nnz,
        eps,
        seed,
        iters: 0,
        flops: 0,
        wall_time: 0.0,
        residual_norm: None,
        atz_norm: None,
        forward_err: None,
        converged: false,
    }
}
