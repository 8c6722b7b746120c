use kaczmarz_core::io::{read_matrix_market, read_vector, write_vector};
use kaczmarz_core::matrix::{dist, norm};
use kaczmarz_core::solvers::theory_bounds;
use kaczmarz_core::{run as solve, SolverConfig, SolverKind};

use crate::args::{SolveArgs, SolveOptions};
use crate::{oracle, CmdResult, EXIT_OK, EXIT_UNSOLVED};

pub(crate) fn config(opts: &SolveOptions) -> SolverConfig {
    SolverConfig {
        eps: opts.eps,
        max_iters: opts.max_iters,
        check_interval: opts.check_interval,
        seed: opts.seed,
        solver: opts.solver,
        use_updated_z: false,
    }
}

pub fn run(args: SolveArgs) -> CmdResult {
    let a = read_matrix_market(&args.matrix)?.into_dual()?;
    let b = read_vector(&args.rhs)?;
    let opts = &args.opts;
    let mut cfg = config(opts);
    cfg.validate()?;

    let reference = oracle(&a, &b, opts.oracle_cap)?;
    let bounds = match &reference {
        Some(r) => Some(theory_bounds(r, opts.eps, opts.delta)?),
        None => None,
    };
    if cfg.max_iters.is_none() {
        if let Some(t) = &bounds {
            cfg = cfg.with_bounds_cap(t);
        }
    }

    let report = solve(&a, &b, &cfg)?;
    println!("solver         {}", report.solver);
    println!("size           {}x{} (nnz {})", a.rows(), a.cols(), a.nnz());
    println!("termination    {}", report.termination);
    println!("iterations     {}", report.iters);
    println!("flops          {}", report.flops);
    println!("check flops    {}", report.check_flops);
    if let Some(r) = report.residual_norm {
        println!("residual       {r:.6e}");
    }
    if let Some(v) = report.atz_norm {
        println!("|A^T z|        {v:.6e}");
    }
    println!("wall time      {:.6}s", report.wall_time);
    if let (Some(r), Some(t)) = (&reference, &bounds) {
        println!("kappa_F^2      {:.6e}", t.kappa_f_sq);
        println!("T*             {:.6e}", t.t_star);
        if report.solver != SolverKind::Rop && norm(&report.x) > 0.0 {
            println!("forward error  {:.6e}", dist(&report.x, &r.x_ls) / norm(&report.x));
            println!("error bound    {:.6e}", t.forward_err_bound);
        }
    }

    if let Some(path) = &args.out {
        match (&report.solver, &report.z) {
            (SolverKind::Rop, Some(z)) => write_vector(z, path)?,
            _ => write_vector(&report.x, path)?,
        }
    }
    Ok(if report.converged() { EXIT_OK } else { EXIT_UNSOLVED })
}
