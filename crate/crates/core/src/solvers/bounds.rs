use crate::error::{Error, Result};
use crate::reference::ReferenceSolution;

/// Closed-form convergence and cost bounds evaluated from reference data.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryBounds {
    /// `‖A‖_F² / σ_min²`.
    pub kappa_f_sq: f64,
    /// `σ_max² / σ_min²`.
    pub cond_sq: f64,
    /// Expected per-iteration contraction `1 − 1/κ_F²`.
    pub rate: f64,
    pub eps: f64,
    pub delta: f64,
    /// `ln(32(1 + 2κ²) / (δ ε²))`.
    pub log_term: f64,
    /// Iteration bound `2 κ_F² · log_term`, holding with probability `1 − δ`.
    pub t_star: f64,
    /// `ε κ_F (1 + κ_F)`.
    pub forward_err_bound: f64,
    /// `10 (m + n) · rank · κ² · log_term`.
    pub worst_flops: f64,
    /// `20 · nnz · κ² · log_term`.
    pub expected_flops: f64,
    pub x_ls_norm_sq: f64,
    pub b_range_norm_sq: f64,
    pub b_perp_norm_sq: f64,
    pub sigma_min_sq: f64,
}

/// Evaluates every bound for accuracy `eps ∈ (0, 2)` and failure
/// probability `delta ∈ (0, 1)`.
pub fn theory_bounds(r: &ReferenceSolution, eps: f64, delta: f64) -> Result<TheoryBounds> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::InvalidRange { name: "eps", value: eps, range: "(0, 2)" });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidRange { name: "delta", value: delta, range: "(0, 1)" });
    }
    let kappa_f_sq = r.kappa_f_sq;
    let cond_sq = r.cond_sq;
    let log_term = (32.0 * (1.0 + 2.0 * cond_sq) / (delta * eps * eps)).ln();
    let kappa_f = kappa_f_sq.sqrt();
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    Ok(TheoryBounds {
        kappa_f_sq,
        cond_sq,
        rate: (1.0 - 1.0 / kappa_f_sq).max(0.0),
        eps,
        delta,
        log_term,
        t_star: 2.0 * kappa_f_sq * log_term,
        forward_err_bound: eps * kappa_f * (1.0 + kappa_f),
        worst_flops: 10.0 * (r.rows + r.cols) as f64 * r.rank as f64 * cond_sq * log_term,
        expected_flops: 20.0 * r.nnz as f64 * cond_sq * log_term,
        x_ls_norm_sq: sq(&r.x_ls),
        b_range_norm_sq: sq(&r.b_range),
        b_perp_norm_sq: sq(&r.b_perp),
        sigma_min_sq: r.sigma_min() * r.sigma_min(),
    })
}

impl TheoryBounds {
    /// REK: `E‖x^(T) − x_LS‖² ≤ rate^⌊T/2⌋ (1 + 2κ²) ‖x_LS‖²`.
    pub fn rek_envelope(&self, t: u64) -> f64 {
        self.rate.powf((t / 2) as f64) * (1.0 + 2.0 * self.cond_sq) * self.x_ls_norm_sq
    }

    /// RK on a consistent system: `rate^k · ‖x⁰ − x_LS‖²`.
    pub fn rk_envelope(&self, k: u64, initial_err_sq: f64) -> f64 {
        self.rate.powf(k as f64) * initial_err_sq
    }

    /// RK with noise `w`: `rate^k ‖x⁰ − x*‖² + ‖w‖²/σ_min²`.
    pub fn noisy_rk_envelope(&self, k: u64, initial_err_sq: f64, noise_norm_sq: f64) -> f64 {
        self.rate.powf(k as f64) * initial_err_sq + noise_norm_sq / self.sigma_min_sq
    }

    /// ROP: `E‖z^(k) − b_⊥‖² ≤ rate^k ‖b_R‖²`.
    pub fn rop_envelope(&self, k: u64) -> f64 {
        self.rate.powf(k as f64) * self.b_range_norm_sq
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::min_norm_solve;
    use crate::DenseMatrix;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-13 * b.abs().max(1.0)
    }

    #[test]
    fn identity_bounds() {
        let n = 6;
        let r = min_norm_solve(&DenseMatrix::identity(n), &[1.0; 6], None).unwrap();
        let (eps, delta) = (1e-8, 0.1);
        let t = theory_bounds(&r, eps, delta).unwrap();
        assert!(close(t.kappa_f_sq, n as f64));
        assert!(close(t.cond_sq, 1.0));
        let expect = 2.0 * n as f64 * (96.0 / (delta * eps * eps)).ln();
        assert!(close(t.t_star, expect));
    }

    #[test]
    fn rank_one_bounds() {
        let a = DenseMatrix::from_fn(4, 3, |i, j| (i + 1) as f64 * (j as f64 - 1.5));
        let r = min_norm_solve(&a, &[1.0, 0.0, 0.0, 0.0], None).unwrap();
        assert_eq!(r.rank, 1);
        let t = theory_bounds(&r, 1e-6, 0.5).unwrap();
        assert!(close(t.kappa_f_sq, 1.0));
        assert!(close(t.t_star, 2.0 * (96.0 / (0.5 * 1e-12f64)).ln()));
        assert!(t.rate.abs() < 1e-15);
    }

    #[test]
    fn invalid_ranges() {
        let r = min_norm_solve(&DenseMatrix::identity(2), &[1.0, 1.0], None).unwrap();
        for (e, d) in [(0.0, 0.1), (2.0, 0.1), (1e-3, 0.0), (1e-3, 1.0), (f64::NAN, 0.5)] {
            assert!(matches!(theory_bounds(&r, e, d), Err(Error::InvalidRange { .. })));
        }
    }
}
