#![allow(dead_code)]

use kaczmarz_core::gen::{generate, InstanceKind, InstanceSpec};
use kaczmarz_core::{DenseMatrix, DualSparseMatrix, RngStream};

pub const EPS: f64 = f64::EPSILON;

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub fn gaussian(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let mut rng = RngStream::new(seed);
    DenseMatrix::from_fn(m, n, |_, _| rng.standard_normal())
}

pub fn instance(kind: InstanceKind, m: usize, n: usize, seed: u64, consistent: bool) -> (DualSparseMatrix, Vec<f64>) {
    let mut spec = InstanceSpec::new(kind, m, n, seed);
    spec.consistent = consistent;
    let inst = generate(&spec).unwrap();
    (inst.a, inst.b)
}

/// `b = A·xs` for a Gaussian `xs`.
pub fn consistent_rhs(a: &DualSparseMatrix, seed: u64) -> Vec<f64> {
    let xs = RngStream::new(seed).normal_vec(a.cols());
    a.mat_vec(&xs).unwrap()
}

/// Row `i` of `a` as a dense vector.
pub fn dense_row(a: &DualSparseMatrix, i: usize) -> Vec<f64> {
    let mut r = vec![0.0; a.cols()];
    let (idx, vals) = a.row(i);
    for (&j, &v) in idx.iter().zip(vals) {
        r[j] = v;
    }
    r
}

pub fn dense_col(a: &DualSparseMatrix, j: usize) -> Vec<f64> {
    let mut c = vec![0.0; a.rows()];
    let (idx, vals) = a.col(j);
    for (&i, &v) in idx.iter().zip(vals) {
        c[i] = v;
    }
    c
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
