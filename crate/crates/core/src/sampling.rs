//! Seeded random streams and O(1) discrete sampling.
//!
//! All randomness in the crate goes through [`RngStream`], a thin wrapper
//! around xoshiro256++ seeded via SplitMix64. Its output sequence is fixed
//! by the algorithm definitions and therefore identical on every platform.
//!
//! [`AliasTable`] implements Vose's variant of Walker's alias method: O(n)
//! construction with small/large worklists, then one uniform draw for the
//! bucket and one for the coin per sample.

use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::matrix::DualSparseMatrix;

/// Stream-separation constants mixed into the user seed.
pub const ROW_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;
pub const COL_STREAM: u64 = 0xD1B5_4A32_D192_ED03;

/// Deterministic pseudo-random stream (xoshiro256++).
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: Xoshiro256PlusPlus::seed_from_u64(seed) }
    }

    /// A stream whose seed is `seed` mixed with a fixed stream constant.
    pub fn derived(seed: u64, stream: u64) -> Self {
        Self::new(seed ^ stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn normal_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.standard_normal()).collect()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Alias table over `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    /// Builds a table sampling index `k` with probability `w_k / Σ w`.
    ///
    /// Zero weights are kept in place with zero mass.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::DegenerateWeights("empty weight vector"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::DegenerateWeights("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateWeights("all weights are zero"));
        }

        let n = weights.len();
        let scale = n as f64 / total;
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        let mut prob = vec![0.0; n];
        let mut alias: Vec<usize> = (0..n).collect();

        let mut small = Vec::with_capacity(n);
        let mut large = Vec::with_capacity(n);
        for (k, &p) in scaled.iter().enumerate() {
            if p < 1.0 {
                small.push(k);
            } else {
                large.push(k);
            }
        }

        while let (Some(&l), Some(&g)) = (small.last(), large.last()) {
            small.pop();
            large.pop();
            prob[l] = scaled[l];
            alias[l] = g;
            scaled[g] = (scaled[g] + scaled[l]) - 1.0;
            if scaled[g] < 1.0 {
                small.push(g);
            } else {
                large.push(g);
            }
        }

        // Leftovers carry mass 1 up to roundoff. A zero-weight leftover can
        // only appear through cancellation; route it to a positive outcome.
        let fallback = weights.iter().enumerate().fold(0, |best, (k, w)| if *w > weights[best] { k } else { best });
        for k in large.into_iter().chain(small) {
            if weights[k] > 0.0 {
                prob[k] = 1.0;
                alias[k] = k;
            } else {
                prob[k] = 0.0;
                alias[k] = fallback;
            }
        }

        Ok(Self { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn alias(&self) -> &[usize] {
        &self.alias
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        let k = rng.index(self.prob.len());
        if rng.uniform() < self.prob[k] {
            k
        } else {
            self.alias[k]
        }
    }

    /// Exact probability mass of every outcome implied by the table.
    pub fn reconstructed_mass(&self) -> Vec<f64> {
        let n = self.prob.len();
        let mut mass = self.prob.clone();
        for (l, &a) in self.alias.iter().enumerate() {
            mass[a] += 1.0 - self.prob[l];
        }
        mass.iter_mut().for_each(|m| *m /= n as f64);
        mass
    }
}

/// Row distribution `q_i = ‖a^(i)‖² / ‖A‖_F²`.
pub fn row_sampler(a: &DualSparseMatrix) -> Result<AliasTable> {
    AliasTable::new(a.row_sq_norms())
}

/// Column distribution `p_j = ‖a_(j)‖² / ‖A‖_F²`.
pub fn col_sampler(a: &DualSparseMatrix) -> Result<AliasTable> {
    AliasTable::new(a.col_sq_norms())
}
