//! Randomized orthogonal projection.
//!
//! Starting from `z⁰ = b`, each step picks column `j` with probability
//! `‖a_(j)‖²/‖A‖_F²` and projects `z` onto the orthogonal complement of
//! `a_(j)`. The iterate converges in expectation to the component of `b`
//! orthogonal to the column space; `b − z` approximates the projection onto it.

use std::borrow::Cow;

use super::{check_rhs, drive, SolveReport, SolverConfig, SolverKind};
use crate::error::Result;
use crate::matrix::{norm, DualSparseMatrix};
use crate::sampling::{col_sampler, AliasTable, RngStream, COL_STREAM};

/// `z ← (I − a_(j) a_(j)ᵀ / ‖a_(j)‖²) z`; adds `4·nnz(a_(j)) + 1` flops.
///
/// Column `j` must have positive norm, which norm-proportional sampling
/// guarantees.
pub fn rop_step(a: &DualSparseMatrix, z: &mut [f64], j: usize, flops: &mut u64) -> Result<()> {
    let coef = a.col_dot(j, z, flops)? / a.col_sq_norms()[j];
    *flops += 1;
    a.axpy_col(j, -coef, z, flops)
}

/// Stateful ROP iteration over a borrowed matrix.
#[derive(Debug, Clone)]
pub struct Rop<'a> {
    a: &'a DualSparseMatrix,
    cols: Cow<'a, AliasTable>,
    rng: RngStream,
    z: Vec<f64>,
    iters: u64,
    flops: u64,
}

impl<'a> Rop<'a> {
    pub fn new(a: &'a DualSparseMatrix, b: &[f64], seed: u64) -> Result<Self> {
        check_rhs(a, b)?;
        Ok(Self::build(a, b, Cow::Owned(col_sampler(a)?), seed))
    }

    /// Reuses a prebuilt column sampler (must come from `a`).
    pub fn with_sampler(a: &'a DualSparseMatrix, b: &[f64], cols: &'a AliasTable, seed: u64) -> Result<Self> {
        check_rhs(a, b)?;
        Ok(Self::build(a, b, Cow::Borrowed(cols), seed))
    }

    fn build(a: &'a DualSparseMatrix, b: &[f64], cols: Cow<'a, AliasTable>, seed: u64) -> Self {
        Self { a, cols, rng: RngStream::derived(seed, COL_STREAM), z: b.to_vec(), iters: 0, flops: 0 }
    }

    pub fn step(&mut self) {
        let j = self.cols.sample(&mut self.rng);
        let a = self.a;
        let coef = a.col_dot_unchecked(j, &self.z, &mut self.flops) / a.col_sq_norms()[j];
        self.flops += 1;
        a.axpy_col_unchecked(j, -coef, &mut self.z, &mut self.flops);
        self.iters += 1;
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn into_z(self) -> Vec<f64> {
        self.z
    }

    pub fn iters(&self) -> u64 {
        self.iters
    }

    pub fn flops(&self) -> u64 {
        self.flops
    }

    /// `‖Aᵀz‖`, plus whether `‖Aᵀz‖ ≤ eps·‖A‖_F·‖z‖`.
    pub fn check(&self, eps: f64) -> (bool, f64) {
        let atz = norm(&self.a.mat_t_vec(&self.z).expect("conforming"));
        let ok = atz <= eps * self.a.frob_sq().sqrt() * norm(&self.z);
        (ok, atz)
    }
}

pub fn run_rop(a: &DualSparseMatrix, b: &[f64], config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut rop = Rop::new(a, b, config.seed)?;
    let (max_iters, check) = config.resolved(a);
    let check_cost = 2 * a.nnz() as u64 + 2 * (a.rows() + a.cols()) as u64;
    let mut check_flops = 0;
    let (termination, wall_time) = drive(
        &mut rop,
        max_iters,
        check,
        Rop::step,
        |s| {
            check_flops += check_cost;
            s.check(config.eps).0
        },
        Rop::iters,
    );
    let (_, atz) = rop.check(config.eps);
    log::debug!("rop: {} after {} iterations", termination, rop.iters);
    Ok(SolveReport {
        solver: SolverKind::Rop,
        x: Vec::new(),
        iters: rop.iters,
        flops: rop.flops,
        check_flops,
        termination,
        residual_norm: None,
        atz_norm: Some(atz),
        wall_time,
        z: Some(rop.z),
    })
}
