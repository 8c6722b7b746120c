//! Randomized Kaczmarz.
//!
//! Each step picks row `i` with probability `‖a^(i)‖²/‖A‖_F²` and projects
//! `x` onto the hyperplane `⟨a^(i), x⟩ = b_i`. Started from `x⁰ = 0` the
//! iterates stay in the row space of `A`; on consistent systems they converge
//! in expectation to `A⁺b`.

use std::borrow::Cow;

use super::{check_rhs, drive, SolveReport, SolverConfig, SolverKind};
use crate::error::Result;
use crate::matrix::{dist, norm, DualSparseMatrix};
use crate::sampling::{row_sampler, AliasTable, RngStream, ROW_STREAM};

/// `x ← x + (beta − ⟨a^(i), x⟩)/‖a^(i)‖² · a^(i)`; adds `4·nnz(a^(i)) + 2`
/// flops.
pub fn rk_step(a: &DualSparseMatrix, x: &mut [f64], i: usize, beta: f64, flops: &mut u64) -> Result<()> {
    let coef = (beta - a.row_dot(i, x, flops)?) / a.row_sq_norms()[i];
    *flops += 2;
    a.axpy_row(i, coef, x, flops)
}

#[derive(Debug, Clone)]
pub struct Rk<'a> {
    a: &'a DualSparseMatrix,
    b: &'a [f64],
    rows: Cow<'a, AliasTable>,
    rng: RngStream,
    x: Vec<f64>,
    iters: u64,
    flops: u64,
}

impl<'a> Rk<'a> {
    pub fn new(a: &'a DualSparseMatrix, b: &'a [f64], seed: u64) -> Result<Self> {
        check_rhs(a, b)?;
        Ok(Self::build(a, b, Cow::Owned(row_sampler(a)?), seed))
    }

    /// Reuses a prebuilt row sampler (must come from `a`).
    pub fn with_sampler(a: &'a DualSparseMatrix, b: &'a [f64], rows: &'a AliasTable, seed: u64) -> Result<Self> {
        check_rhs(a, b)?;
        Ok(Self::build(a, b, Cow::Borrowed(rows), seed))
    }

    fn build(a: &'a DualSparseMatrix, b: &'a [f64], rows: Cow<'a, AliasTable>, seed: u64) -> Self {
        Self { a, b, rows, rng: RngStream::derived(seed, ROW_STREAM), x: vec![0.0; a.cols()], iters: 0, flops: 0 }
    }

    /// Performs one step and returns the row used and the step coefficient,
    /// so that `x_new − x_old = coef · a^(row)`.
    pub fn step(&mut self) -> (usize, f64) {
        let i = self.rows.sample(&mut self.rng);
        let a = self.a;
        let coef = (self.b[i] - a.row_dot_unchecked(i, &self.x, &mut self.flops)) / a.row_sq_norms()[i];
        self.flops += 2;
        a.axpy_row_unchecked(i, coef, &mut self.x, &mut self.flops);
        self.iters += 1;
        (i, coef)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn iters(&self) -> u64 {
        self.iters
    }

    pub fn flops(&self) -> u64 {
        self.flops
    }

    /// `‖Ax − b‖`, plus whether `‖Ax − b‖ ≤ eps·‖A‖_F·‖x‖`.
    ///
    /// At `x = 0` the check passes only when `b = 0`.
    pub fn check(&self, eps: f64) -> (bool, f64) {
        let ax = self.a.mat_vec(&self.x).expect("conforming");
        let res = dist(&ax, self.b);
        let xn = norm(&self.x);
        let ok = if xn == 0.0 { norm(self.b) == 0.0 } else { res <= eps * self.a.frob_sq().sqrt() * xn };
        (ok, res)
    }
}

pub fn run_rk(a: &DualSparseMatrix, b: &[f64], config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut rk = Rk::new(a, b, config.seed)?;
    let (max_iters, check) = config.resolved(a);
    let check_cost = 2 * a.nnz() as u64 + 3 * a.rows() as u64 + 2 * a.cols() as u64;
    let mut check_flops = 0;
    let (termination, wall_time) = drive(
        &mut rk,
        max_iters,
        check,
        |s| {
            s.step();
        },
        |s| {
            check_flops += check_cost;
            s.check(config.eps).0
        },
        Rk::iters,
    );
    let (_, res) = rk.check(config.eps);
    log::debug!("rk: {} after {} iterations", termination, rk.iters);
    Ok(SolveReport {
        solver: SolverKind::Rk,
        iters: rk.iters,
        flops: rk.flops,
        check_flops,
        termination,
        residual_norm: Some(res),
        atz_norm: None,
        wall_time,
        z: None,
        x: rk.x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::dot;
    use crate::DenseMatrix;

    #[test]
    fn identity_step() {
        let a = DenseMatrix::identity(2).to_dual().unwrap();
        let mut x = [0.0, 0.0];
        let mut f = 0;
        rk_step(&a, &mut x, 0, 7.0, &mut f).unwrap();
        assert_eq!(x, [7.0, 0.0]);
        assert_eq!(f, 4 + 2);
        rk_step(&a, &mut x, 0, 7.0, &mut f).unwrap();
        assert_eq!(x, [7.0, 0.0]);
    }

    #[test]
    fn lands_on_hyperplane() {
        let a = DualSparseMatrix::from_triplets(2, 3, &[(0, 0, 0.3), (0, 1, -1.7), (0, 2, 2.2), (1, 1, 1.0)]).unwrap();
        let mut x = vec![1.0, 2.0, -3.0];
        let mut f = 0;
        rk_step(&a, &mut x, 0, 0.25, &mut f).unwrap();
        let (_, vals) = a.row(0);
        let resid = dot(vals, &x) - 0.25;
        let tol = 8.0 * 3.0 * f64::EPSILON * norm(vals) * norm(&x);
        assert!(resid.abs() <= tol);
    }

    #[test]
    fn identity_solves_exactly() {
        let a = DenseMatrix::identity(2).to_dual().unwrap();
        let b = [1.0, 2.0];
        let r = run_rk(&a, &b, &SolverConfig { seed: 1, ..Default::default() }).unwrap();
        assert!(r.converged());
        assert_eq!(r.x, vec![1.0, 2.0]);
    }

    #[test]
    fn zero_rhs_is_immediately_solved() {
        let a = DenseMatrix::identity(3).to_dual().unwrap();
        let r = run_rk(&a, &[0.0; 3], &SolverConfig::default()).unwrap();
        assert!(r.converged());
        assert_eq!(r.iters, 0);
    }

    #[test]
    fn cap_is_respected() {
        let a = DenseMatrix::from_fn(6, 3, |i, j| (i + 2 * j) as f64 + 1.0).to_dual().unwrap();
        let b = [1.0, -1.0, 2.0, 0.0, 3.0, 1.0];
        let cfg = SolverConfig { max_iters: Some(5), check_interval: Some(1), ..Default::default() };
        let r = run_rk(&a, &b, &cfg).unwrap();
        assert_eq!(r.termination, super::super::Termination::MaxIters);
        assert_eq!(r.iters, 5);
    }
}
