mod common;

use common::*;
use kaczmarz_core::gen::{generate, rank_deficient, InstanceKind, InstanceSpec};
use kaczmarz_core::matrix::{dist, dot, norm};
use kaczmarz_core::reference::{min_norm_solve, reference_for, svd};
use kaczmarz_core::sampling::AliasTable;
use kaczmarz_core::{DenseMatrix, DualSparseMatrix, RngStream};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn corpus() -> Vec<(DualSparseMatrix, Vec<f64>)> {
    let mut out = Vec::new();
    for (k, kind) in [InstanceKind::SparseGaussian, InstanceKind::DenseGaussian, InstanceKind::IllConditioned]
        .into_iter()
        .enumerate()
    {
        for (m, n) in [(40, 10), (25, 25), (12, 30)] {
            let mut spec = InstanceSpec::new(kind, m, n, 100 + k as u64);
            spec.cond_target = 1e4;
            let inst = generate(&spec).unwrap();
            out.push((inst.a, inst.b));
        }
    }
    for rank in [1, 5, 20] {
        let a = rank_deficient(60, 40, rank, rank as u64).unwrap();
        out.push((a, RngStream::new(7).normal_vec(60)));
    }
    out
}

#[test]
fn condition_number_sandwich() {
    for (a, b) in corpus() {
        let r = reference_for(&a, &b).unwrap();
        let slack = 1.0 + 1e-12;
        assert!(r.cond_sq <= r.kappa_f_sq * slack);
        assert!(r.kappa_f_sq <= r.rank as f64 * r.cond_sq * slack);
    }
}

#[test]
fn rhs_splits_orthogonally() {
    for (a, b) in corpus() {
        let r = reference_for(&a, &b).unwrap();
        let bb = sq(&b);
        assert!((bb - sq(&r.b_range) - sq(&r.b_perp)).abs() <= 64.0 * EPS * bb);
        assert!(dot(&r.b_range, &r.b_perp).abs() <= 64.0 * EPS * bb);
        let ax = a.mat_vec(&r.x_ls).unwrap();
        assert!(dist(&ax, &r.b_range) <= 128.0 * EPS * r.kappa_f_sq.sqrt() * norm(&b));
    }
}

#[test]
fn resolving_with_range_component_is_stable() {
    for (a, b) in corpus() {
        let r = reference_for(&a, &b).unwrap();
        let again = reference_for(&a, &r.b_range).unwrap();
        let tol = 128.0 * EPS * r.kappa_f_sq.sqrt() * norm(&r.x_ls);
        assert!(dist(&again.x_ls, &r.x_ls) <= tol);
        let via_pinv = r.pinv_apply(&r.b_range).unwrap();
        assert!(dist(&via_pinv, &r.x_ls) <= tol);
    }
}

/// Largest singular value of the explicit pseudo-inverse by power iteration.
#[test]
fn pseudo_inverse_norm_by_power_iteration() {
    for (a, b) in corpus().into_iter().take(6) {
        let r = reference_for(&a, &b).unwrap();
        let (m, n) = (a.rows(), a.cols());
        let cols: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut e = vec![0.0; m];
                e[i] = 1.0;
                r.pinv_apply(&e).unwrap()
            })
            .collect();
        let pinv = DenseMatrix::from_fn(n, m, |i, j| cols[j][i]);
        let mut v = RngStream::new(1).normal_vec(m);
        let mut est = 0.0;
        for _ in 0..20_000 {
            let w = pinv.mat_t_vec(&pinv.mat_vec(&v).unwrap()).unwrap();
            let nw = norm(&w);
            v = w.iter().map(|x| x / nw).collect();
            let next = nw.sqrt();
            if (next - est).abs() <= 1e-13 * next {
                break;
            }
            est = next;
        }
        let expect = 1.0 / r.sigma_min();
        assert!((est - expect).abs() <= 1e-8 * expect, "{est} vs {expect}");
    }
}

#[test]
fn minimum_norm_among_least_squares_solutions() {
    let a = rank_deficient(30, 20, 8, 3).unwrap();
    let b = RngStream::new(5).normal_vec(30);
    let r = reference_for(&a, &b).unwrap();
    let d = a.to_dense();
    let full = svd(&d).unwrap();
    let mut rng = RngStream::new(6);
    let base_res = dist(&a.mat_vec(&r.x_ls).unwrap(), &b);
    for _ in 0..50 {
        let mut x = r.x_ls.clone();
        for v in &full.v[r.rank..] {
            let c = rng.standard_normal();
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += c * vi;
            }
        }
        let res = dist(&a.mat_vec(&x).unwrap(), &b);
        assert!((res - base_res).abs() <= 1e-10 * base_res);
        assert!(norm(&x) > norm(&r.x_ls));
    }
}

#[test]
fn projector_residual_matches_dense_projector() {
    let d = gaussian(8, 12, 2);
    let r = min_norm_solve(&d, &[0.0; 8], None).unwrap();
    // P = A⁺A built column by column.
    let p = DenseMatrix::from_fn(12, 12, |i, j| {
        let mut e = vec![0.0; 12];
        e[j] = 1.0;
        r.pinv_apply(&d.mat_vec(&e).unwrap()).unwrap()[i]
    });
    let v = RngStream::new(3).normal_vec(12);
    let pv = p.mat_vec(&v).unwrap();
    let direct = dist(&v, &pv);
    assert!((r.projector_residual(&v).unwrap() - direct).abs() <= 1e-12 * norm(&v));
}

#[test]
fn chi_square_goodness_of_fit() {
    let outcomes = 100;
    let draws = 100_000;
    let critical = ChiSquared::new((outcomes - 1) as f64).unwrap().inverse_cdf(1.0 - 1e-3);
    let mut passes = 0;
    for seed in 0..100u64 {
        let mut rng = RngStream::new(10_000 + seed);
        let w: Vec<f64> = (0..outcomes).map(|_| 0.05 + rng.uniform()).collect();
        let total: f64 = w.iter().sum();
        let t = AliasTable::new(&w).unwrap();
        let mut counts = vec![0u64; outcomes];
        for _ in 0..draws {
            counts[t.sample(&mut rng)] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&w)
            .map(|(&c, wk)| {
                let e = draws as f64 * wk / total;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        if stat <= critical {
            passes += 1;
        }
    }
    assert!(passes >= 99, "{passes}/100");
}

proptest! {
    #[test]
    fn svd_reconstructs(seed in any::<u64>(), m in 1usize..12, n in 1usize..12) {
        let d = gaussian(m, n, seed);
        let s = svd(&d).unwrap();
        prop_assert!(s.reconstruction_error(&d) <= 64.0 * EPS * d.frob_sq().sqrt() * (m.max(n) as f64));
        prop_assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn least_squares_normal_equations(seed in any::<u64>(), m in 2usize..15, n in 1usize..8) {
        let d = gaussian(m, n, seed);
        let b = RngStream::new(seed ^ 9).normal_vec(m);
        let r = min_norm_solve(&d, &b, None).unwrap();
        let res = sub(&b, &d.mat_vec(&r.x_ls).unwrap());
        let atr = d.mat_t_vec(&res).unwrap();
        let scale = d.frob_sq().sqrt() * norm(&b) * r.kappa_f_sq.sqrt();
        prop_assert!(norm(&atr) <= 256.0 * EPS * scale);
    }
}
