//! Dense reference oracle.
//!
//! One-sided (Hestenes) Jacobi SVD and the quantities derived from it:
//! the minimum-norm least-squares solution `A⁺b`, the split of `b` into its
//! column-space component and orthogonal remainder, numerical rank, and the
//! condition quantities `κ_F² = ‖A‖_F²/σ_min²` and `κ² = σ_max²/σ_min²`.
//!
//! This is a test fixture, not a production path: work is `O(mn·min(m,n))`
//! per sweep and inputs are capped at desk scale.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm, DenseMatrix, DualSparseMatrix};

/// Largest `m·n` accepted by the dense oracle.
pub const DENSE_CAP: usize = 4_000_000;
const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(σ) Vᵀ` with `p = min(m, n)` columns in `U` and `V`.
///
/// Singular values are sorted descending. Columns of `U` belonging to zero
/// singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Columns of `U`, each of length `m`.
    pub u: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
    /// Columns of `V`, each of length `n`.
    pub v: Vec<Vec<f64>>,
}

impl Svd {
    /// `‖A − U Σ Vᵀ‖_F`.
    pub fn reconstruction_error(&self, a: &DenseMatrix) -> f64 {
        let mut err = 0.0;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let r: f64 = (0..self.sigma.len()).map(|k| self.u[k][i] * self.sigma[k] * self.v[k][j]).sum();
                err += (a.get(i, j) - r).powi(2);
            }
        }
        err.sqrt()
    }
}

/// One-sided Jacobi SVD.
///
/// For `m ≥ n` the columns of `A` are orthogonalized by plane rotations
/// accumulated into `V`; wide inputs are handled through `Aᵀ`. On return
/// every pair of working columns satisfies `|⟨w_p, w_q⟩| ≤ ε‖w_p‖‖w_q‖`, so
/// `‖A − UΣVᵀ‖_F ≤ c·ε·‖A‖_F` with `c` a small multiple of `max(m, n)`.
pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    if m.saturating_mul(n) > DENSE_CAP {
        return Err(Error::TooLarge { rows: m, cols: n });
    }
    if a.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if m >= n {
        Ok(jacobi_tall(a))
    } else {
        let t = jacobi_tall(&a.transpose());
        Ok(Svd { u: t.v, sigma: t.sigma, v: t.u })
    }
}

fn jacobi_tall(a: &DenseMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let tol = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, c)| (norm(c), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let mut u = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for (s, j) in order {
        let col = if s > 0.0 { w[j].iter().map(|x| x / s).collect() } else { vec![0.0; m] };
        u.push(col);
        sigma.push(s);
        vs.push(v[j].clone());
    }
    Svd { u, sigma, v: vs }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Default relative rank tolerance `8·max(m, n)·ε`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    8.0 * rows.max(cols) as f64 * f64::EPSILON
}

/// Ground truth for one `(A, b)` pair.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub frob_sq: f64,
    /// `A⁺b`.
    pub x_ls: Vec<f64>,
    /// All `min(m, n)` singular values, descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Projection of `b` onto the column space.
    pub b_range: Vec<f64>,
    /// `b − b_range`.
    pub b_perp: Vec<f64>,
    pub kappa_f_sq: f64,
    pub cond_sq: f64,
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl ReferenceSolution {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values[0]
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values[self.rank - 1]
    }

    /// Leading `rank` left singular vectors.
    pub fn range_basis(&self) -> &[Vec<f64>] {
        &self.u[..self.rank]
    }

    /// Leading `rank` right singular vectors.
    pub fn row_space_basis(&self) -> &[Vec<f64>] {
        &self.v[..self.rank]
    }

    /// `A⁺ y`.
    pub fn pinv_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        check(y, self.rows)?;
        let mut x = vec![0.0; self.cols];
        for k in 0..self.rank {
            let c = dot(&self.u[k], y) / self.singular_values[k];
            for (xi, vi) in x.iter_mut().zip(&self.v[k]) {
                *xi += c * vi;
            }
        }
        Ok(x)
    }

    /// `‖(I − A⁺A) v‖`, the distance of `v` from the row space.
    pub fn projector_residual(&self, v: &[f64]) -> Result<f64> {
        check(v, self.cols)?;
        Ok(norm(&residual(v, self.row_space_basis())))
    }

    /// `‖(I − AA⁺) y‖`, the distance of `y` from the column space.
    pub fn range_residual(&self, y: &[f64]) -> Result<f64> {
        check(y, self.rows)?;
        Ok(norm(&residual(y, self.range_basis())))
    }

    /// `AA⁺ y`.
    pub fn project_range(&self, y: &[f64]) -> Result<Vec<f64>> {
        check(y, self.rows)?;
        Ok(project(y, self.range_basis()))
    }

    /// `A⁺A v`.
    pub fn project_row_space(&self, v: &[f64]) -> Result<Vec<f64>> {
        check(v, self.cols)?;
        Ok(project(v, self.row_space_basis()))
    }
}

fn check(v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: v.len() });
    }
    Ok(())
}

fn project(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for q in basis {
        let c = dot(q, v);
        for (o, qi) in out.iter_mut().zip(q) {
            *o += c * qi;
        }
    }
    out
}

fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let p = project(v, basis);
    v.iter().zip(&p).map(|(a, b)| a - b).collect()
}

/// Minimum-norm least-squares solution and derived quantities.
///
/// `rank_tol` is relative to `σ_max`; `None` selects [`default_rank_tol`].
pub fn min_norm_solve(a: &DenseMatrix, b: &[f64], rank_tol: Option<f64>) -> Result<ReferenceSolution> {
    check(b, a.rows())?;
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(a.rows(), a.cols()));
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidRange { name: "rank_tol", value: tol, range: "[0, ∞)" });
    }
    let Svd { u, sigma, v } = svd(a)?;
    let frob_sq = a.frob_sq();
    if sigma[0] == 0.0 {
        return Err(Error::AllZeroMatrix);
    }
    let rank = sigma.iter().filter(|s| **s > tol * sigma[0]).count();

    let mut x_ls = vec![0.0; a.cols()];
    let mut b_range = vec![0.0; a.rows()];
    for k in 0..rank {
        let c = dot(&u[k], b);
        for (xi, vi) in x_ls.iter_mut().zip(&v[k]) {
            *xi += c / sigma[k] * vi;
        }
        for (bi, ui) in b_range.iter_mut().zip(&u[k]) {
            *bi += c * ui;
        }
    }
    let b_perp: Vec<f64> = b.iter().zip(&b_range).map(|(x, y)| x - y).collect();
    let smin_sq = sigma[rank - 1] * sigma[rank - 1];

    Ok(ReferenceSolution {
        rows: a.rows(),
        cols: a.cols(),
        nnz: a.nnz(),
        frob_sq,
        x_ls,
        kappa_f_sq: frob_sq / smin_sq,
        cond_sq: sigma[0] * sigma[0] / smin_sq,
        singular_values: sigma,
        rank,
        b_range,
        b_perp,
        u,
        v,
    })
}

/// Densifies a sparse matrix and solves with the default rank tolerance.
pub fn reference_for(a: &DualSparseMatrix, b: &[f64]) -> Result<ReferenceSolution> {
    if a.rows().saturating_mul(a.cols()) > DENSE_CAP {
        return Err(Error::TooLarge { rows: a.rows(), cols: a.cols() });
    }
    min_norm_solve(&a.to_dense(), b, None)
}
