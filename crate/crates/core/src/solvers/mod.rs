//! Randomized row/column action solvers.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::matrix::DualSparseMatrix;

mod bounds;
pub mod rek;
pub mod rk;
pub mod rop;

pub use bounds::{theory_bounds, TheoryBounds};
pub use rek::{rek_iteration, rek_termination_check, run_rek, termination_quantities, Rek, TerminationQuantities};
pub use rk::{rk_step, run_rk, Rk};
pub use rop::{rop_step, run_rop, Rop};

/// Default relative accuracy.
pub const DEFAULT_EPS: f64 = 1e-14;

/// Cap used when no reference bounds are available: `10⁶ · min(m, n)`.
pub fn fallback_max_iters(rows: usize, cols: usize) -> u64 {
    1_000_000 * rows.min(cols) as u64
}

/// Default convergence-check interval `8 · min(m, n)`.
pub fn default_check_interval(rows: usize, cols: usize) -> u64 {
    8 * rows.min(cols) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// Randomized orthogonal projection.
    Rop,
    /// Randomized Kaczmarz.
    Rk,
    /// Randomized extended Kaczmarz.
    Rek,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Rop => "rop",
            SolverKind::Rk => "rk",
            SolverKind::Rek => "rek",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rop" => Ok(SolverKind::Rop),
            "rk" => Ok(SolverKind::Rk),
            "rek" => Ok(SolverKind::Rek),
            other => Err(format!("unknown solver `{other}` (expected rek, rk or rop)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative accuracy, `0 < eps < 2`.
    pub eps: f64,
    /// Iteration cap; `None` resolves to [`fallback_max_iters`].
    pub max_iters: Option<u64>,
    /// Iterations between convergence checks; `None` resolves to
    /// [`default_check_interval`].
    pub check_interval: Option<u64>,
    pub seed: u64,
    pub solver: SolverKind,
    /// REK only: feed the freshly updated `z` entry into the `x` update
    /// instead of the pre-update value.
    pub use_updated_z: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            max_iters: None,
            check_interval: None,
            seed: 0,
            solver: SolverKind::Rek,
            use_updated_z: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 2.0) {
            return Err(Error::InvalidRange { name: "eps", value: self.eps, range: "(0, 2)" });
        }
        if self.max_iters == Some(0) {
            return Err(Error::InvalidRange { name: "max_iters", value: 0.0, range: "[1, ∞)" });
        }
        if self.check_interval == Some(0) {
            return Err(Error::InvalidRange { name: "check_interval", value: 0.0, range: "[1, ∞)" });
        }
        Ok(())
    }

    /// Sets the cap to `⌈2 T*⌉` from reference bounds.
    pub fn with_bounds_cap(mut self, bounds: &TheoryBounds) -> Self {
        self.max_iters = Some(((2.0 * bounds.t_star).ceil() as u64).max(1));
        self
    }

    pub(crate) fn resolved(&self, a: &DualSparseMatrix) -> (u64, u64) {
        let max = self.max_iters.unwrap_or_else(|| fallback_max_iters(a.rows(), a.cols()));
        let check = self.check_interval.unwrap_or_else(|| default_check_interval(a.rows(), a.cols()));
        (max, check)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solver: SolverKind,
    /// Estimate of `A⁺b`; empty for ROP.
    pub x: Vec<f64>,
    /// Estimate of the component of `b` orthogonal to the column space
    /// (ROP and REK).
    pub z: Option<Vec<f64>>,
    pub iters: u64,
    /// Iteration flops, excluding convergence checks.
    pub flops: u64,
    /// Flops spent in convergence checks.
    pub check_flops: u64,
    pub termination: Termination,
    /// `‖Ax − (b − z)‖` for REK, `‖Ax − b‖` for RK.
    pub residual_norm: Option<f64>,
    /// `‖Aᵀz‖` for REK and ROP.
    pub atz_norm: Option<f64>,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// Runs the solver selected in `config`.
pub fn run(a: &DualSparseMatrix, b: &[f64], config: &SolverConfig) -> Result<SolveReport> {
    match config.solver {
        SolverKind::Rop => run_rop(a, b, config),
        SolverKind::Rk => run_rk(a, b, config),
        SolverKind::Rek => run_rek(a, b, config),
    }
}

pub(crate) fn check_rhs(a: &DualSparseMatrix, b: &[f64]) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: b.len() });
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Shared driver: check at iteration 0 and every `check` iterations after,
/// stop on convergence or at the cap.
pub(crate) fn drive<S>(
    state: &mut S,
    max_iters: u64,
    check: u64,
    mut step: impl FnMut(&mut S),
    mut converged: impl FnMut(&S) -> bool,
    iters: impl Fn(&S) -> u64,
) -> (Termination, f64) {
    let start = Instant::now();
    loop {
        let k = iters(state);
        if k.is_multiple_of(check) && converged(state) {
            return (Termination::Converged, start.elapsed().as_secs_f64());
        }
        if k >= max_iters {
            // Final look so a run ending exactly on the cap is not misreported.
            let t = if !k.is_multiple_of(check) && converged(state) {
                Termination::Converged
            } else {
                Termination::MaxIters
            };
            return (t, start.elapsed().as_secs_f64());
        }
        step(state);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = SolverConfig::default();
        assert!(c.validate().is_ok());
        for bad in [0.0, -1.0, 2.0, 3.0, f64::NAN] {
            c.eps = bad;
            assert!(matches!(c.validate(), Err(Error::InvalidRange { name: "eps", .. })));
        }
        c.eps = 1e-6;
        c.max_iters = Some(0);
        assert!(c.validate().is_err());
        c.max_iters = Some(1);
        c.check_interval = Some(0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("REK".parse::<SolverKind>().unwrap(), SolverKind::Rek);
        assert_eq!("rop".parse::<SolverKind>().unwrap(), SolverKind::Rop);
        assert!("cg".parse::<SolverKind>().is_err());
        assert_eq!(SolverKind::Rk.to_string(), "rk");
    }

    #[test]
    fn defaults() {
        assert_eq!(DEFAULT_EPS, 1e-14);
        assert_eq!(default_check_interval(100, 30), 240);
        assert_eq!(fallback_max_iters(5, 3), 3_000_000);
    }
}
