//! Seeded random test instances.
//!
//! Three ensembles:
//!
//! * `SparseGaussian`: Bernoulli(density) pattern with standard normal values;
//! * `DenseGaussian`: standard normal entries;
//! * `IllConditioned`: `U Σ Vᵀ` with random orthonormal factors and
//!   `Σ = diag(1, c^{-1/2}, …, c^{-1/2})`, so `κ² = c`.
//!
//! The Gaussian ensembles have their columns scaled to unit norm. The
//! ill-conditioned ensemble is left unscaled so its spectrum is exact.
//!
//! The right-hand side is standard normal, or for consistent instances
//! `b = A x* + noise·g` with a planted `x* = Aᵀ h` (`h` Gaussian), which lies in
//! the row space so that `x* = A⁺(A x*)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{dot, norm, DenseMatrix, DualSparseMatrix};
use crate::sampling::RngStream;

const MAX_DRAWS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    SparseGaussian,
    DenseGaussian,
    IllConditioned,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::SparseGaussian => "sparse",
            InstanceKind::DenseGaussian => "dense",
            InstanceKind::IllConditioned => "illcond",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sparse" => Ok(InstanceKind::SparseGaussian),
            "dense" => Ok(InstanceKind::DenseGaussian),
            "illcond" => Ok(InstanceKind::IllConditioned),
            other => Err(format!("unknown instance kind `{other}` (expected sparse, dense or illcond)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub rows: usize,
    pub cols: usize,
    /// Fraction of stored entries, sparse ensemble only.
    pub density: f64,
    /// Target `κ² = σ_max²/σ_min²`, ill-conditioned ensemble only.
    pub cond_target: f64,
    /// Build `b` in the column space (plus `noise_scale` Gaussian noise).
    pub consistent: bool,
    pub noise_scale: f64,
    /// Dense ensemble only: draw a matrix of this rank instead.
    pub rank: Option<usize>,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind, rows: usize, cols: usize, seed: u64) -> Self {
        Self {
            kind,
            rows,
            cols,
            density: 0.25,
            cond_target: 1e6,
            consistent: false,
            noise_scale: 0.0,
            rank: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidShape { rows: self.rows, cols: self.cols });
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidRange { name: "density", value: self.density, range: "(0, 1]" });
        }
        if !(self.cond_target >= 1.0 && self.cond_target.is_finite()) {
            return Err(Error::InvalidRange { name: "cond_target", value: self.cond_target, range: "[1, ∞)" });
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::InvalidRange { name: "noise_scale", value: self.noise_scale, range: "[0, ∞)" });
        }
        if let Some(r) = self.rank {
            if self.kind != InstanceKind::DenseGaussian || r == 0 || r > self.rows.min(self.cols) {
                return Err(Error::InvalidRange { name: "rank", value: r as f64, range: "[1, min(m, n)], dense only" });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub a: DualSparseMatrix,
    pub b: Vec<f64>,
    /// Planted solution for consistent instances.
    pub planted: Option<Vec<f64>>,
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = RngStream::new(spec.seed);
    let a = match spec.kind {
        InstanceKind::SparseGaussian => sparse_gaussian(spec, &mut rng)?,
        InstanceKind::DenseGaussian => match spec.rank {
            Some(r) => low_rank(spec.rows, spec.cols, r, &mut rng)?,
            None => {
                let d = DenseMatrix::from_fn(spec.rows, spec.cols, |_, _| rng.standard_normal());
                normalize_columns(&d).to_dual()?
            }
        },
        InstanceKind::IllConditioned => ill_conditioned(spec.rows, spec.cols, spec.cond_target, &mut rng)?.to_dual()?,
    };
    let (b, planted) = rhs(&a, spec.consistent, spec.noise_scale, &mut rng)?;
    Ok(Instance { a, b, planted })
}

/// Dense `m×n` matrix of the given rank: product of Gaussian `m×r` and `r×n`
/// factors, columns scaled to unit norm.
pub fn rank_deficient(rows: usize, cols: usize, rank: usize, seed: u64) -> Result<DualSparseMatrix> {
    if rank == 0 || rank > rows.min(cols) {
        return Err(Error::InvalidRange { name: "rank", value: rank as f64, range: "[1, min(m, n)]" });
    }
    low_rank(rows, cols, rank, &mut RngStream::new(seed))
}

fn low_rank(rows: usize, cols: usize, rank: usize, rng: &mut RngStream) -> Result<DualSparseMatrix> {
    let left = DenseMatrix::from_fn(rows, rank, |_, _| rng.standard_normal());
    let right = DenseMatrix::from_fn(rank, cols, |_, _| rng.standard_normal());
    normalize_columns(&left.mat_mul(&right)?).to_dual()
}

/// Right-hand side for a given matrix, drawn from `rng`.
pub fn rhs(
    a: &DualSparseMatrix,
    consistent: bool,
    noise_scale: f64,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    if !consistent {
        return Ok((rng.normal_vec(a.rows()), None));
    }
    let h = rng.normal_vec(a.rows());
    let planted = a.mat_t_vec(&h)?;
    let mut b = a.mat_vec(&planted)?;
    if noise_scale > 0.0 {
        for bi in b.iter_mut() {
            *bi += noise_scale * rng.standard_normal();
        }
    }
    Ok((b, Some(planted)))
}

fn sparse_gaussian(spec: &InstanceSpec, rng: &mut RngStream) -> Result<DualSparseMatrix> {
    for _ in 0..MAX_DRAWS {
        let mut triplets = Vec::new();
        for i in 0..spec.rows {
            for j in 0..spec.cols {
                // Draw the mask and the value unconditionally so the stream
                // advances identically for every density.
                let keep = rng.uniform() < spec.density;
                let v = rng.standard_normal();
                if keep && v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        if triplets.is_empty() {
            continue;
        }
        let mut norms = vec![0.0; spec.cols];
        for &(_, j, v) in &triplets {
            norms[j] += v * v;
        }
        for t in triplets.iter_mut() {
            t.2 /= norms[t.1].sqrt();
        }
        return DualSparseMatrix::from_triplets(spec.rows, spec.cols, &triplets);
    }
    Err(Error::DegenerateDensity(MAX_DRAWS))
}

fn normalize_columns(a: &DenseMatrix) -> DenseMatrix {
    let norms: Vec<f64> = (0..a.cols()).map(|j| norm(&a.column(j))).collect();
    DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| if norms[j] > 0.0 { a.get(i, j) / norms[j] } else { 0.0 })
}

/// `k` orthonormal columns of length `len` from a Gaussian draw
/// (Gram–Schmidt applied twice).
pub fn random_orthonormal(len: usize, k: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    assert!(k <= len);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    while q.len() < k {
        let mut v = rng.normal_vec(len);
        for _ in 0..2 {
            for prev in &q {
                let c = dot(prev, &v);
                for (vi, pi) in v.iter_mut().zip(prev) {
                    *vi -= c * pi;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            q.push(v);
        }
    }
    q
}

fn ill_conditioned(rows: usize, cols: usize, cond_target: f64, rng: &mut RngStream) -> Result<DenseMatrix> {
    let p = rows.min(cols);
    let u = random_orthonormal(rows, p, rng);
    let v = random_orthonormal(cols, p, rng);
    let small = cond_target.powf(-0.5);
    let sigma: Vec<f64> = (0..p).map(|k| if k == 0 { 1.0 } else { small }).collect();
    Ok(DenseMatrix::from_fn(rows, cols, |i, j| (0..p).map(|k| u[k][i] * sigma[k] * v[k][j]).sum()))
}
