//! Multifrontal sparse LU with hierarchically compressed fronts.
//!
//! The crate is `no_std` (it only needs `alloc`). It contains:
//!
//! - [`sparse`]: compressed-column storage, row scaling, matvec and the
//!   symmetrized adjacency graph.
//! - [`ordering`]: nested dissection and the elimination tree with its
//!   pivot, coupling and frontal index sets.
//! - [`bdlr`]: boundary-distance row/column selection and pseudoskeleton
//!   compression of off-diagonal blocks.
//! - [`hodlr`]: HODLR matrices built by sampling, their Woodbury
//!   factorization, and deferred update representations.
//! - [`multifrontal`]: the conventional (dense) and accelerated (HODLR)
//!   multifrontal factorizations and the two-pass solve.
//! - [`krylov`]: right-preconditioned restarted GMRES, diagonal and ILUT
//!   preconditioners.
//! - [`problems`]: Poisson and linear-elasticity test matrix generators.
//!
//! IO, the command-line driver and timing live in the companion `frontal`
//! crate.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bdlr;
pub mod dense;
mod error;
pub mod hodlr;
pub mod krylov;
pub mod multifrontal;
pub mod ordering;
pub mod problems;
pub mod sparse;

pub use error::{Error, Result};

pub use bdlr::{BlockSampler, LowRankFactor};
pub use dense::{DenseLu, DenseMat};
pub use hodlr::{HodlrFactorization, HodlrMatrix, UpdateRep};
pub use krylov::{ConvergenceHistory, LinearOperator, Preconditioner};
pub use multifrontal::{FactorMode, MfFactorization, MfParams};

pub use ordering::{EliminationTree, SeparatorTree};
pub use sparse::{AdjGraph, ScalingRecord, SparseMatrix};
