//! Randomized Kaczmarz-type solvers for minimum-norm least squares.
//!
//! The crate provides three row/column action methods over a matrix stored
//! in both compressed-row and compressed-column layouts:
//!
//! * randomized orthogonal projection ([`solvers::rop`]), which drives a
//!   vector `z` towards the component of `b` orthogonal to the column space;
//! * randomized Kaczmarz ([`solvers::rk`]) for consistent systems;
//! * randomized extended Kaczmarz ([`solvers::rek`]), which interleaves the
//!   two and converges to `A⁺b` for arbitrary, possibly rank-deficient and
//!   inconsistent systems.
//!
//! Alongside the solvers live a dense SVD-based reference oracle
//! ([`reference`]), seeded instance generators ([`gen`]) and Matrix Market /
//! CSV input-output ([`io`]).

pub mod error;
pub mod gen;
pub mod io;
pub mod matrix;
pub mod reference;
pub mod sampling;
pub mod solvers;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, DualSparseMatrix, SparsityProfile};
pub use reference::{min_norm_solve, ReferenceSolution, Svd};
pub use sampling::{AliasTable, RngStream};
pub use solvers::{run, run_rek, run_rk, run_rop, SolveReport, SolverConfig, SolverKind, Termination, TheoryBounds};
