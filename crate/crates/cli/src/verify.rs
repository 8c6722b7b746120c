use rayon::prelude::*;

use kaczmarz_core::io::{read_matrix_market, read_vector};
use kaczmarz_core::matrix::{dist, norm, norm_sq};
use kaczmarz_core::solvers::{run_rek, theory_bounds, Rek, TheoryBounds};
use kaczmarz_core::{DualSparseMatrix, ReferenceSolution, RngStream, SolverConfig};

use crate::args::VerifyArgs;
use crate::{build_instance, oracle, CmdResult, EXIT_OK, EXIT_UNSOLVED};

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

struct Run {
    iters: u64,
    flops: u64,
    converged: bool,
    /// `‖x − x_LS‖ / ‖x‖`, `None` when `x = 0`.
    rel_err: Option<f64>,
}

pub fn run(args: VerifyArgs) -> CmdResult {
    let (a, b) = match &args.matrix {
        Some(path) => {
            let a = read_matrix_market(path)?.into_dual()?;
            let b = match &args.rhs {
                Some(p) => read_vector(p)?,
                None => RngStream::new(args.seed).normal_vec(a.rows()),
            };
            (a, b)
        }
        None => {
            let inst = build_instance(&args.ensemble, args.m, args.n, args.seed)?;
            (inst.a, inst.b)
        }
    };
    let r = oracle(&a, &b, args.oracle_cap)?
        .ok_or_else(|| format!("{}x{} exceeds the oracle cap {}", a.rows(), a.cols(), args.oracle_cap))?;
    let t = theory_bounds(&r, args.eps, args.delta)?;
    println!(
        "instance {}x{} nnz {} rank {}  kappa_F^2 {:.4e}  kappa^2 {:.4e}  T* {:.4e}",
        a.rows(),
        a.cols(),
        a.nnz(),
        r.rank,
        t.kappa_f_sq,
        t.cond_sq,
        t.t_star
    );

    let seeds: Vec<u64> = (0..args.reps).map(|k| args.seed.wrapping_add(k)).collect();
    let mut checks = vec![oracle_check(&r, &b)];
    checks.push(envelope_check(&a, &b, &r, &t, &seeds, args.envelope_slack));

    let cfg =
        SolverConfig { eps: args.eps, check_interval: args.check_interval, ..Default::default() }.with_bounds_cap(&t);
    let runs: Vec<Run> = seeds
        .par_iter()
        .map(|&seed| {
            let rep = run_rek(&a, &b, &SolverConfig { seed, ..cfg.clone() }).expect("validated input");
            let xn = norm(&rep.x);
            Run {
                iters: rep.iters,
                flops: rep.flops,
                converged: rep.converged(),
                rel_err: (xn > 0.0).then(|| dist(&rep.x, &r.x_ls) / xn),
            }
        })
        .collect();
    checks.extend(run_checks(&a, &r, &t, &runs));

    let mut all = true;
    for c in &checks {
        println!("{} {:<16} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        all &= c.pass;
    }
    Ok(if all { EXIT_OK } else { EXIT_UNSOLVED })
}

fn oracle_check(r: &ReferenceSolution, b: &[f64]) -> Check {
    let slack = 1.0 + 1e-12;
    let sandwich = r.cond_sq <= r.kappa_f_sq * slack && r.kappa_f_sq <= r.rank as f64 * r.cond_sq * slack;
    let bb = norm_sq(b);
    let split =
        (bb - norm_sq(&r.b_range) - norm_sq(&r.b_perp)).abs() <= 64.0 * f64::EPSILON * bb.max(f64::MIN_POSITIVE);
    Check {
        name: "oracle",
        pass: sandwich && split,
        detail: format!("kappa^2 <= kappa_F^2 <= rank*kappa^2: {sandwich}, |b|^2 split: {split}"),
    }
}

fn envelope_check(
    a: &DualSparseMatrix,
    b: &[f64],
    r: &ReferenceSolution,
    t: &TheoryBounds,
    seeds: &[u64],
    slack: f64,
) -> Check {
    let marks: Vec<u64> = [2.0, 4.0, 8.0].iter().map(|c| (c * t.kappa_f_sq).ceil() as u64).collect();
    let last = *marks.last().unwrap();
    let per_seed: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rek = Rek::new(a, b, seed).expect("validated input");
            let mut out = Vec::with_capacity(marks.len());
            for k in 1..=last {
                rek.step();
                if marks.contains(&k) {
                    out.push(norm_sq(&sub(rek.x(), &r.x_ls)));
                }
            }
            out
        })
        .collect();
    let mut pass = true;
    let mut detail = Vec::new();
    for (c, &mark) in marks.iter().enumerate() {
        let mean = per_seed.iter().map(|v| v[c]).sum::<f64>() / seeds.len() as f64;
        let bound = slack * t.rek_envelope(mark);
        pass &= mean <= bound;
        detail.push(format!("T={mark}: {mean:.3e}/{bound:.3e}"));
    }
    Check { name: "rek-envelope", pass, detail: detail.join("  ") }
}

fn run_checks(a: &DualSparseMatrix, r: &ReferenceSolution, t: &TheoryBounds, runs: &[Run]) -> Vec<Check> {
    let total = runs.len() as f64;
    let need = ((1.0 - t.delta) * total).ceil() as usize;

    let within = runs.iter().filter(|x| x.converged && x.iters as f64 <= t.t_star).count();
    let iteration = Check {
        name: "iteration-bound",
        pass: within >= need,
        detail: format!("{within}/{} runs converged within T* = {:.4e} (need {need})", runs.len(), t.t_star),
    };

    let converged: Vec<&Run> = runs.iter().filter(|x| x.converged).collect();
    let x_ls_zero = norm(&r.x_ls) == 0.0;
    let mut worst: f64 = 0.0;
    let mut ok = !converged.is_empty();
    for run in &converged {
        match run.rel_err {
            Some(e) => {
                worst = worst.max(e);
                ok &= e <= t.forward_err_bound * (1.0 + 1e-6);
            }
            None => ok &= x_ls_zero,
        }
    }
    let forward = Check {
        name: "forward-error",
        pass: ok,
        detail: format!(
            "worst {worst:.3e} vs bound {:.3e} over {} converged runs",
            t.forward_err_bound,
            converged.len()
        ),
    };

    let iters: u64 = runs.iter().map(|x| x.iters).sum();
    let flops: u64 = runs.iter().map(|x| x.flops).sum();
    let (m, n) = (a.rows() as u64, a.cols() as u64);
    let flop_model = if a.nnz() as u64 == m * n {
        let exact = runs.iter().all(|x| x.flops == (4 * (m + n) + 2) * x.iters);
        Check {
            name: "flop-model",
            pass: exact,
            detail: format!("dense: flops == (4(m+n)+2)*iters on every run: {exact}"),
        }
    } else {
        let p = a.sparsity_profile();
        let model = 4.0 * (p.r_avg + p.c_avg) + 2.0;
        let per_iter = flops as f64 / iters.max(1) as f64;
        Check {
            name: "flop-model",
            pass: iters > 0 && (per_iter / model - 1.0).abs() <= 0.05,
            detail: format!("{per_iter:.3} flops/iteration vs 4(R_avg+C_avg)+2 = {model:.3}"),
        }
    };

    let mean_flops = flops as f64 / total;
    let expected = Check {
        name: "expected-flops",
        pass: mean_flops <= t.expected_flops,
        detail: format!("mean {mean_flops:.4e} vs bound {:.4e}", t.expected_flops),
    };
    let under = runs.iter().filter(|x| x.flops as f64 <= t.worst_flops).count();
    let worst_case = Check {
        name: "worst-flops",
        pass: under >= need,
        detail: format!("{under}/{} runs within {:.4e} (need {need})", runs.len(), t.worst_flops),
    };
    vec![iteration, forward, flop_model, expected, worst_case]
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
