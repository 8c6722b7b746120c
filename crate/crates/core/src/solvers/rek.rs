//! Randomized extended Kaczmarz.
//!
//! Every iteration samples a row `i` and, independently, a column `j`. The
//! column step projects `z` off `a_(j)` (driving `z` to the part of `b` outside
//! the column space); the row step is a Kaczmarz projection for the system
//! `Ax = b − z`. Starting from `x⁰ = 0`, `z⁰ = b` the iterates converge in
//! expectation to the minimum-norm least-squares solution for any `A`, of any
//! rank, and any `b`.
//!
//! Termination is checked every `check_interval` iterations:
//!
//! ```text
//! ‖Ax − (b − z)‖ ≤ ε ‖A‖_F ‖x‖   and   ‖Aᵀz‖ ≤ ε ‖A‖_F² ‖x‖
//! ```
//!
//! When both hold, `‖x − A⁺b‖ / ‖x‖ ≤ ε κ_F (1 + κ_F)`.

use std::borrow::Cow;

use super::{check_rhs, drive, SolveReport, SolverConfig, SolverKind};
use crate::error::{Error, Result};
use crate::matrix::{norm, DualSparseMatrix};
use crate::sampling::{col_sampler, row_sampler, AliasTable, RngStream, COL_STREAM, ROW_STREAM};

/// One REK iteration for a given row `i` and column `j`.
///
/// The `x` update reads `z_i` from before the column step unless
/// `use_updated_z` is set. Adds `4(nnz(a^(i)) + nnz(a_(j))) + 2` flops, which
/// is `4(m + n) + 2` for a fully dense matrix: dot products are charged
/// `2·nnz` and the scalar work (two divisions, two subtractions) is folded
/// into that tally.
#[allow(clippy::too_many_arguments)]
pub fn rek_iteration(
    a: &DualSparseMatrix,
    b: &[f64],
    x: &mut [f64],
    z: &mut [f64],
    i: usize,
    j: usize,
    use_updated_z: bool,
    flops: &mut u64,
) -> Result<()> {
    if i >= a.rows() {
        return Err(Error::IndexOutOfRange { index: i, bound: a.rows() });
    }
    if j >= a.cols() {
        return Err(Error::IndexOutOfRange { index: j, bound: a.cols() });
    }
    for (len, want) in [(b.len(), a.rows()), (z.len(), a.rows()), (x.len(), a.cols())] {
        if len != want {
            return Err(Error::DimensionMismatch { expected: want, got: len });
        }
    }
    iteration(a, b, x, z, i, j, use_updated_z, flops);
    Ok(())
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn iteration(
    a: &DualSparseMatrix,
    b: &[f64],
    x: &mut [f64],
    z: &mut [f64],
    i: usize,
    j: usize,
    use_updated_z: bool,
    flops: &mut u64,
) {
    let z_i = z[i];
    let coef = a.col_dot_unchecked(j, z, flops) / a.col_sq_norms()[j];
    a.axpy_col_unchecked(j, -coef, z, flops);
    let z_i = if use_updated_z { z[i] } else { z_i };
    let coef = (b[i] - z_i - a.row_dot_unchecked(i, x, flops)) / a.row_sq_norms()[i];
    a.axpy_row_unchecked(i, coef, x, flops);
    *flops += 2;
}

/// Values of the two termination quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminationQuantities {
    /// `‖Ax − (b − z)‖`.
    pub residual: f64,
    /// `‖Aᵀz‖`.
    pub atz: f64,
    pub converged: bool,
}

/// Evaluates both termination inequalities.
///
/// At `x = 0` the relative tests divide by zero; they are replaced by
/// `‖b − z‖ ≤ ε‖b‖` and `‖Aᵀz‖ ≤ ε‖A‖_F‖b‖`, i.e. `‖x‖` is stood in for by
/// the scale `‖b‖/‖A‖_F`. This accepts `b = 0` and `b ⊥ R(A)` (where the
/// answer is `x = 0`) and rejects the starting point otherwise.
pub fn termination_quantities(
    a: &DualSparseMatrix,
    b: &[f64],
    x: &[f64],
    z: &[f64],
    eps: f64,
) -> Result<TerminationQuantities> {
    check_rhs(a, b)?;
    if z.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: z.len() });
    }
    let ax = a.mat_vec(x)?;
    let residual = ax
        .iter()
        .zip(b)
        .zip(z)
        .map(|((axi, bi), zi)| {
            let r = axi - (bi - zi);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    let atz = norm(&a.mat_t_vec(z)?);
    let fro = a.frob_sq().sqrt();
    let xn = norm(x);
    let converged = if xn == 0.0 {
        let bn = norm(b);
        residual <= eps * bn && atz <= eps * fro * bn
    } else {
        residual <= eps * fro * xn && atz <= eps * a.frob_sq() * xn
    };
    Ok(TerminationQuantities { residual, atz, converged })
}

pub fn rek_termination_check(a: &DualSparseMatrix, b: &[f64], x: &[f64], z: &[f64], eps: f64) -> Result<bool> {
    Ok(termination_quantities(a, b, x, z, eps)?.converged)
}

/// Stateful REK iteration.
#[derive(Debug, Clone)]
pub struct Rek<'a> {
    a: &'a DualSparseMatrix,
    b: &'a [f64],
    rows: Cow<'a, AliasTable>,
    cols: Cow<'a, AliasTable>,
    row_rng: RngStream,
    col_rng: RngStream,
    x: Vec<f64>,
    z: Vec<f64>,
    iters: u64,
    flops: u64,
    use_updated_z: bool,
}

impl<'a> Rek<'a> {
    pub fn new(a: &'a DualSparseMatrix, b: &'a [f64], seed: u64) -> Result<Self> {
        check_rhs(a, b)?;
        let rows = Cow::Owned(row_sampler(a)?);
        let cols = Cow::Owned(col_sampler(a)?);
        Ok(Self::build(a, b, rows, cols, seed))
    }

    /// Reuses prebuilt samplers (both must come from `a`).
    pub fn with_samplers(
        a: &'a DualSparseMatrix,
        b: &'a [f64],
        rows: &'a AliasTable,
        cols: &'a AliasTable,
        seed: u64,
    ) -> Result<Self> {
        check_rhs(a, b)?;
        Ok(Self::build(a, b, Cow::Borrowed(rows), Cow::Borrowed(cols), seed))
    }

    fn build(
        a: &'a DualSparseMatrix,
        b: &'a [f64],
        rows: Cow<'a, AliasTable>,
        cols: Cow<'a, AliasTable>,
        seed: u64,
    ) -> Self {
        Self {
            a,
            b,
            rows,
            cols,
            row_rng: RngStream::derived(seed, ROW_STREAM),
            col_rng: RngStream::derived(seed, COL_STREAM),
            x: vec![0.0; a.cols()],
            z: b.to_vec(),
            iters: 0,
            flops: 0,
            use_updated_z: false,
        }
    }

    pub fn use_updated_z(mut self, on: bool) -> Self {
        self.use_updated_z = on;
        self
    }

    /// Performs one iteration and returns the sampled `(row, column)`.
    pub fn step(&mut self) -> (usize, usize) {
        let i = self.rows.sample(&mut self.row_rng);
        let j = self.cols.sample(&mut self.col_rng);
        iteration(self.a, self.b, &mut self.x, &mut self.z, i, j, self.use_updated_z, &mut self.flops);
        self.iters += 1;
        (i, j)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn iters(&self) -> u64 {
        self.iters
    }

    pub fn flops(&self) -> u64 {
        self.flops
    }

    pub fn check(&self, eps: f64) -> TerminationQuantities {
        termination_quantities(self.a, self.b, &self.x, &self.z, eps).expect("conforming")
    }
}

pub fn run_rek(a: &DualSparseMatrix, b: &[f64], config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut rek = Rek::new(a, b, config.seed)?.use_updated_z(config.use_updated_z);
    let (max_iters, check) = config.resolved(a);
    let check_cost = 4 * a.nnz() as u64 + 6 * a.rows() as u64 + 2 * a.cols() as u64;
    let mut check_flops = 0;
    let (termination, wall_time) = drive(
        &mut rek,
        max_iters,
        check,
        |s| {
            s.step();
        },
        |s| {
            check_flops += check_cost;
            s.check(config.eps).converged
        },
        Rek::iters,
    );
    let q = rek.check(config.eps);
    log::debug!("rek: {} after {} iterations (residual {:.3e}, atz {:.3e})", termination, rek.iters, q.residual, q.atz);
    Ok(SolveReport {
        solver: SolverKind::Rek,
        iters: rek.iters,
        flops: rek.flops,
        check_flops,
        termination,
        residual_norm: Some(q.residual),
        atz_norm: Some(q.atz),
        wall_time,
        x: rek.x,
        z: Some(rek.z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::dist;
    use crate::solvers::Termination;
    use crate::DenseMatrix;

    #[test]
    fn zero_rhs_converges_at_first_check() {
        let a = DenseMatrix::from_fn(5, 3, |i, j| (i * 3 + j) as f64 - 4.0).to_dual().unwrap();
        let r = run_rek(&a, &[0.0; 5], &SolverConfig::default()).unwrap();
        assert!(r.converged());
        assert_eq!(r.iters, 0);
        assert!(r.x.iter().all(|v| *v == 0.0));
        assert!(r.z.unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn identity_system() {
        let a = DenseMatrix::identity(3).to_dual().unwrap();
        let b = [2.0, -1.0, 0.5];
        let r = run_rek(&a, &b, &SolverConfig { seed: 8, ..Default::default() }).unwrap();
        assert!(r.converged());
        assert!(dist(&r.x, &b) < 1e-15);
        assert!(norm(r.z.as_ref().unwrap()) < 1e-15);
    }

    #[test]
    fn with_zero_z_reduces_to_kaczmarz() {
        let a = DualSparseMatrix::from_triplets(3, 2, &[(0, 0, 1.0), (1, 1, 2.0), (2, 0, 1.0), (2, 1, 1.0)]).unwrap();
        let b = [1.0, 2.0, 2.0];
        let mut x = vec![0.5, -0.5];
        let mut z = vec![0.0; 3];
        let mut x_rk = x.clone();
        let (mut f1, mut f2) = (0, 0);
        rek_iteration(&a, &b, &mut x, &mut z, 2, 1, false, &mut f1).unwrap();
        super::super::rk_step(&a, &mut x_rk, 2, b[2], &mut f2).unwrap();
        assert_eq!(x, x_rk);
        assert_eq!(z, vec![0.0; 3]);
    }

    #[test]
    fn termination_check_cases() {
        let a = DenseMatrix::identity(2).to_dual().unwrap();
        let b = [1.0, 2.0];
        // Exact solution, z = b_perp = 0.
        assert!(rek_termination_check(&a, &b, &b, &[0.0, 0.0], 1e-14).unwrap());
        // Nothing solved yet.
        assert!(!rek_termination_check(&a, &b, &[0.0, 0.0], &b, 1e-14).unwrap());
        // b ⊥ R(A): x = 0 is the answer.
        let col = DualSparseMatrix::from_triplets(2, 1, &[(0, 0, 1.0)]).unwrap();
        assert!(rek_termination_check(&col, &[0.0, 3.0], &[0.0], &[0.0, 3.0], 1e-14).unwrap());
    }

    #[test]
    fn bad_indices() {
        let a = DenseMatrix::identity(2).to_dual().unwrap();
        let mut f = 0;
        let err = rek_iteration(&a, &[0.0; 2], &mut [0.0; 2], &mut [0.0; 2], 2, 0, false, &mut f);
        assert!(matches!(err, Err(Error::IndexOutOfRange { .. })));
        let err = rek_iteration(&a, &[0.0; 2], &mut [0.0; 3], &mut [0.0; 2], 0, 0, false, &mut f);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn one_iteration_cap() {
        let a = DenseMatrix::from_fn(40, 10, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0).to_dual().unwrap();
        let b: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let cfg = SolverConfig { max_iters: Some(1), ..Default::default() };
        let r = run_rek(&a, &b, &cfg).unwrap();
        assert_eq!(r.termination, Termination::MaxIters);
        assert_eq!(r.iters, 1);
    }

    #[test]
    fn updated_z_variant_also_converges() {
        let a = DenseMatrix::from_fn(12, 4, |i, j| ((i * 5 + j * 7) % 13) as f64 - 6.0).to_dual().unwrap();
        let b: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).cos()).collect();
        let cfg = SolverConfig { eps: 1e-10, use_updated_z: true, ..Default::default() };
        let r = run_rek(&a, &b, &cfg).unwrap();
        assert!(r.converged());
        let reference = crate::reference::reference_for(&a, &b).unwrap();
        assert!(dist(&r.x, &reference.x_ls) <= 1e-6 * norm(&reference.x_ls));
    }
}
