//! Immutable matrix storage.
//!
//! [`DualSparseMatrix`] keeps one logical matrix in both compressed-row and
//! compressed-column form so that row actions (Kaczmarz steps) and column
//! actions (orthogonal projection steps) each touch only the stored entries
//! of a single row or column. Squared row/column norms and the squared
//! Frobenius norm are cached at construction.
//!
//! Flop accounting: a multiply-add pair counts as 2 flops, so a sparse dot
//! product or axpy over `k` stored entries adds `2k` to the caller's counter.

use crate::error::{Error, Result};

/// Dense matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn frob_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }

    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(x, self.cols)?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn mat_t_vec(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len(z, self.rows)?;
        let mut out = vec![0.0; self.cols];
        for (i, zi) in z.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * zi;
            }
        }
        Ok(out)
    }

    pub fn mat_mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Converts to dual sparse storage, dropping exact zeros.
    pub fn to_dual(&self) -> Result<DualSparseMatrix> {
        let mut triplets = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        DualSparseMatrix::from_triplets(self.rows, self.cols, &triplets)
    }
}

/// Expected nonzero counts of a norm-sampled row and column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityProfile {
    /// `Σ_i q_i · nnz(row i)` with `q_i = ‖a^(i)‖² / ‖A‖_F²`.
    pub r_avg: f64,
    /// `Σ_j p_j · nnz(col j)` with `p_j = ‖a_(j)‖² / ‖A‖_F²`.
    pub c_avg: f64,
    pub nnz: usize,
}

/// A non-zero matrix held simultaneously in CSR and CSC layouts.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    row_vals: Vec<f64>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    col_vals: Vec<f64>,
    row_sq_norms: Vec<f64>,
    col_sq_norms: Vec<f64>,
    frob_sq: f64,
}

impl DualSparseMatrix {
    /// Builds both layouts from coordinate triplets.
    ///
    /// Duplicate coordinates are summed; entries that end up exactly zero are
    /// dropped. Fails with [`Error::AllZeroMatrix`] when nothing survives.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape { rows, cols });
        }
        for &(r, c, v) in triplets {
            if r >= rows {
                return Err(Error::IndexOutOfRange { index: r, bound: rows });
            }
            if c >= cols {
                return Err(Error::IndexOutOfRange { index: c, bound: cols });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
        }

        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|t| (t.0, t.1));

        // Merge duplicates, summing in input order within each coordinate.
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(sorted.len());
        for (r, c, v) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2 != 0.0);
        if merged.is_empty() {
            return Err(Error::AllZeroMatrix);
        }

        let nnz = merged.len();
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(nnz);
        let mut row_vals = Vec::with_capacity(nnz);
        for &(r, c, v) in &merged {
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            row_vals.push(v);
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }

        let mut col_ptr = vec![0usize; cols + 1];
        for &(_, c, _) in &merged {
            col_ptr[c + 1] += 1;
        }
        for j in 0..cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let mut next = col_ptr.clone();
        let mut row_idx = vec![0usize; nnz];
        let mut col_vals = vec![0.0; nnz];
        // Row-major traversal keeps row indices increasing within each column.
        for &(r, c, v) in &merged {
            let slot = next[c];
            row_idx[slot] = r;
            col_vals[slot] = v;
            next[c] += 1;
        }

        let row_sq_norms: Vec<f64> =
            (0..rows).map(|i| row_vals[row_ptr[i]..row_ptr[i + 1]].iter().map(|v| v * v).sum()).collect();
        let col_sq_norms: Vec<f64> =
            (0..cols).map(|j| col_vals[col_ptr[j]..col_ptr[j + 1]].iter().map(|v| v * v).sum()).collect();
        let frob_sq = row_sq_norms.iter().sum();

        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            row_vals,
            col_ptr,
            row_idx,
            col_vals,
            row_sq_norms,
            col_sq_norms,
            frob_sq,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_vals.len()
    }

    pub fn frob_sq(&self) -> f64 {
        self.frob_sq
    }

    pub fn row_sq_norms(&self) -> &[f64] {
        &self.row_sq_norms
    }

    pub fn col_sq_norms(&self) -> &[f64] {
        &self.col_sq_norms
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.row_vals[r])
    }

    /// Row indices and values of column `j`.
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[r.clone()], &self.col_vals[r])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn col_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    /// Iterates stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (idx, vals) = self.row(i);
            idx.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            d.set(i, j, v);
        }
        d
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if i >= self.rows {
            return Err(Error::IndexOutOfRange { index: i, bound: self.rows });
        }
        Ok(())
    }

    fn check_col(&self, j: usize) -> Result<()> {
        if j >= self.cols {
            return Err(Error::IndexOutOfRange { index: j, bound: self.cols });
        }
        Ok(())
    }

    /// `⟨a^(i), x⟩` over the stored entries of row `i`.
    pub fn row_dot(&self, i: usize, x: &[f64], flops: &mut u64) -> Result<f64> {
        self.check_row(i)?;
        check_len(x, self.cols)?;
        Ok(self.row_dot_unchecked(i, x, flops))
    }

    /// `⟨a_(j), z⟩` over the stored entries of column `j`.
    pub fn col_dot(&self, j: usize, z: &[f64], flops: &mut u64) -> Result<f64> {
        self.check_col(j)?;
        check_len(z, self.rows)?;
        Ok(self.col_dot_unchecked(j, z, flops))
    }

    /// `x ← x + alpha · a^(i)`.
    pub fn axpy_row(&self, i: usize, alpha: f64, x: &mut [f64], flops: &mut u64) -> Result<()> {
        self.check_row(i)?;
        check_len(x, self.cols)?;
        self.axpy_row_unchecked(i, alpha, x, flops);
        Ok(())
    }

    /// `z ← z + alpha · a_(j)`.
    pub fn axpy_col(&self, j: usize, alpha: f64, z: &mut [f64], flops: &mut u64) -> Result<()> {
        self.check_col(j)?;
        check_len(z, self.rows)?;
        self.axpy_col_unchecked(j, alpha, z, flops);
        Ok(())
    }

    #[inline]
    pub(crate) fn row_dot_unchecked(&self, i: usize, x: &[f64], flops: &mut u64) -> f64 {
        let (idx, vals) = self.row(i);
        *flops += 2 * idx.len() as u64;
        idx.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
    }

    #[inline]
    pub(crate) fn col_dot_unchecked(&self, j: usize, z: &[f64], flops: &mut u64) -> f64 {
        let (idx, vals) = self.col(j);
        *flops += 2 * idx.len() as u64;
        idx.iter().zip(vals).map(|(&i, &v)| v * z[i]).sum()
    }

    #[inline]
    pub(crate) fn axpy_row_unchecked(&self, i: usize, alpha: f64, x: &mut [f64], flops: &mut u64) {
        let (idx, vals) = self.row(i);
        *flops += 2 * idx.len() as u64;
        for (&j, &v) in idx.iter().zip(vals) {
            x[j] += alpha * v;
        }
    }

    #[inline]
    pub(crate) fn axpy_col_unchecked(&self, j: usize, alpha: f64, z: &mut [f64], flops: &mut u64) {
        let (idx, vals) = self.col(j);
        *flops += 2 * idx.len() as u64;
        for (&i, &v) in idx.iter().zip(vals) {
            z[i] += alpha * v;
        }
    }

    /// `A x`.
    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(x, self.cols)?;
        let mut sink = 0;
        Ok((0..self.rows).map(|i| self.row_dot_unchecked(i, x, &mut sink)).collect())
    }

    /// `Aᵀ z`.
    pub fn mat_t_vec(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len(z, self.rows)?;
        let mut sink = 0;
        Ok((0..self.cols).map(|j| self.col_dot_unchecked(j, z, &mut sink)).collect())
    }

    pub fn sparsity_profile(&self) -> SparsityProfile {
        let r_avg = (0..self.rows).map(|i| self.row_sq_norms[i] / self.frob_sq * self.row_nnz(i) as f64).sum();
        let c_avg = (0..self.cols).map(|j| self.col_sq_norms[j] / self.frob_sq * self.col_nnz(j) as f64).sum();
        SparsityProfile { r_avg, c_avg, nnz: self.nnz() }
    }
}

fn check_len(v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: v.len() });
    }
    Ok(())
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `‖a − b‖`.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn identity2() -> DualSparseMatrix {
        DualSparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap()
    }

    fn row34() -> DualSparseMatrix {
        DualSparseMatrix::from_triplets(1, 2, &[(0, 0, 3.0), (0, 1, 4.0)]).unwrap()
    }

    #[test]
    fn build_identity() {
        let a = identity2();
        assert_eq!(a.frob_sq(), 2.0);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.to_dense(), DenseMatrix::identity(2));
    }

    #[test]
    fn build_caches_norms() {
        let a = row34();
        assert_eq!(a.row_sq_norms(), &[25.0]);
        assert_eq!(a.col_sq_norms(), &[9.0, 16.0]);
        assert_eq!(a.frob_sq(), 25.0);
    }

    #[test]
    fn cancelling_duplicates_are_all_zero() {
        let err = DualSparseMatrix::from_triplets(1, 1, &[(0, 0, 1.0), (0, 0, -1.0)]).unwrap_err();
        assert!(matches!(err, Error::AllZeroMatrix));
        let err = DualSparseMatrix::from_triplets(3, 3, &[]).unwrap_err();
        assert!(matches!(err, Error::AllZeroMatrix));
    }

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let a = DualSparseMatrix::from_triplets(
            2,
            3,
            &[(1, 2, 1.0), (0, 0, 0.0), (1, 2, 2.0), (0, 1, 5.0), (1, 0, 1.0), (1, 0, -1.0)],
        )
        .unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.triplets().collect::<Vec<_>>(), vec![(0, 1, 5.0), (1, 2, 3.0)]);
        // Zero rows and columns are allowed.
        assert_eq!(a.col_nnz(0), 0);
    }

    #[test]
    fn out_of_range_triplet() {
        let err = DualSparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 2, bound: 2 }));
        let err = DualSparseMatrix::from_triplets(2, 2, &[(0, 7, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 7, bound: 2 }));
    }

    #[test]
    fn dots_and_axpys() {
        let id = identity2();
        let mut f = 0;
        assert_eq!(id.row_dot(0, &[5.0, 7.0], &mut f).unwrap(), 5.0);
        assert_eq!(id.col_dot(1, &[5.0, 7.0], &mut f).unwrap(), 7.0);
        assert_eq!(f, 4);

        assert_eq!(row34().row_dot(0, &[1.0, 1.0], &mut f).unwrap(), 7.0);
        let col = DualSparseMatrix::from_triplets(2, 1, &[(0, 0, 3.0), (1, 0, 4.0)]).unwrap();
        assert_eq!(col.col_dot(0, &[1.0, 1.0], &mut f).unwrap(), 7.0);

        let mut x = [0.0, 0.0];
        id.axpy_row(0, 1.0, &mut x, &mut f).unwrap();
        assert_eq!(x, [1.0, 0.0]);
        id.axpy_col(1, 0.0, &mut x, &mut f).unwrap();
        assert_eq!(x, [1.0, 0.0]);

        assert!(matches!(id.row_dot(2, &[0.0, 0.0], &mut f), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(
            id.axpy_col(0, 1.0, &mut [0.0; 3], &mut f),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn products() {
        let id = identity2();
        assert_eq!(id.mat_vec(&[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
        assert_eq!(id.mat_t_vec(&[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
        assert_eq!(row34().mat_vec(&[1.0, 1.0]).unwrap(), vec![7.0]);
        assert!(matches!(row34().mat_vec(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sparsity_profiles() {
        let id = DenseMatrix::identity(5).to_dual().unwrap();
        let p = id.sparsity_profile();
        assert!((p.r_avg - 1.0).abs() < 1e-15 && (p.c_avg - 1.0).abs() < 1e-15);
        let p = row34().sparsity_profile();
        assert_eq!(p.r_avg, 2.0);
        assert!((p.c_avg - 1.0).abs() < 1e-15);
        assert_eq!(p.nnz, 2);
    }

    #[test]
    fn flop_counts_repeat() {
        let a = row34();
        let (mut f1, mut f2) = (0, 0);
        a.row_dot(0, &[1.0, 2.0], &mut f1).unwrap();
        a.row_dot(0, &[1.0, 2.0], &mut f2).unwrap();
        assert_eq!(f1, f2);
        a.row_dot(0, &[1.0, 2.0], &mut f1).unwrap();
        assert_eq!(f1, 2 * f2);
    }

    fn sparse_strategy() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, f64)>)> {
        (1usize..12, 1usize..12).prop_flat_map(|(m, n)| {
            let t = (0..m, 0..n, -10.0f64..10.0);
            (Just(m), Just(n), prop::collection::vec(t, 1..60))
        })
    }

    proptest! {
        #[test]
        fn dual_layouts_agree((m, n, t) in sparse_strategy()) {
            let Ok(a) = DualSparseMatrix::from_triplets(m, n, &t) else { return Ok(()); };
            let dense = a.to_dense();
            for j in 0..n {
                let (idx, vals) = a.col(j);
                prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
                let mut col = vec![0.0; m];
                for (&i, &v) in idx.iter().zip(vals) {
                    prop_assert!(v != 0.0);
                    col[i] = v;
                }
                prop_assert_eq!(col, dense.column(j));
            }
            for i in 0..m {
                prop_assert!(a.row(i).0.windows(2).all(|w| w[0] < w[1]));
            }
            let eps = f64::EPSILON;
            let tol = 8.0 * a.nnz() as f64 * eps * a.frob_sq();
            prop_assert!((a.col_sq_norms().iter().sum::<f64>() - a.frob_sq()).abs() <= tol);
            prop_assert!((dense.frob_sq() - a.frob_sq()).abs() <= tol);
        }

        #[test]
        fn sparse_ops_match_dense((m, n, t) in sparse_strategy(), seed in 0u64..1000) {
            let Ok(a) = DualSparseMatrix::from_triplets(m, n, &t) else { return Ok(()); };
            let dense = a.to_dense();
            let x: Vec<f64> = (0..n).map(|k| ((k as u64 * 31 + seed) % 17) as f64 - 8.0).collect();
            let z: Vec<f64> = (0..m).map(|k| ((k as u64 * 13 + seed) % 11) as f64 - 5.0).collect();
            let mut f = 0;
            for i in 0..m {
                prop_assert_eq!(a.row_dot(i, &x, &mut f).unwrap(), dot(dense.row(i), &x));
            }
            for j in 0..n {
                prop_assert_eq!(a.col_dot(j, &z, &mut f).unwrap(), dot(&dense.column(j), &z));
            }
            prop_assert_eq!(a.mat_vec(&x).unwrap(), dense.mat_vec(&x).unwrap());
            let atz = a.mat_t_vec(&z).unwrap();
            let atz_dense = dense.mat_t_vec(&z).unwrap();
            for (p, q) in atz.iter().zip(&atz_dense) {
                prop_assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()));
            }
            // Adjointness.
            let lhs = dot(&a.mat_vec(&x).unwrap(), &z);
            let rhs = dot(&x, &atz);
            let tol = 16.0 * a.nnz() as f64 * f64::EPSILON * norm(&x) * norm(&z) * a.frob_sq().sqrt();
            prop_assert!((lhs - rhs).abs() <= tol);

            let mut xr = x.clone();
            a.axpy_row(m - 1, 0.5, &mut xr, &mut f).unwrap();
            for k in 0..n {
                prop_assert_eq!(xr[k], x[k] + 0.5 * dense.get(m - 1, k));
            }
        }

        #[test]
        fn profile_matches_direct_sum((m, n, t) in sparse_strategy()) {
            let Ok(a) = DualSparseMatrix::from_triplets(m, n, &t) else { return Ok(()); };
            let dense = a.to_dense();
            let fro = dense.frob_sq();
            let mut r = 0.0;
            for i in 0..m {
                let row = dense.row(i);
                let nz = row.iter().filter(|v| **v != 0.0).count() as f64;
                r += norm_sq(row) / fro * nz;
            }
            let p = a.sparsity_profile();
            prop_assert!((p.r_avg - r).abs() <= 1e-12 * r);
            prop_assert!(p.r_avg > 0.0 && p.r_avg <= n as f64 + 1e-12);
            prop_assert!(p.c_avg > 0.0 && p.c_avg <= m as f64 + 1e-12);
        }
    }
}
