//! Algebraic curvature tensors in an orthonormal frame, their Schouten/Weyl
//! and concircular decompositions, the curvature operator on bivectors with
//! its spectrum, Hermitian eigenvalue-sum inequalities, intermediate Ricci
//! curvature, and pinching certificates built from all of the above.
//!
//! Everything here is pure computation on small dense arrays. The crate is
//! `no_std` and only needs `alloc`; file formats, parallel batch drivers and
//! the command line live in the `curvop` crate.
//!
//! Index convention: components are taken in a fixed orthonormal frame, the
//! metric is the identity, indices are 0-based, and bivectors `e_i ∧ e_j`
//! with `i < j` are ordered lexicographically.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod certify;
pub mod decompose;
mod error;
pub mod linalg;
pub mod operator;
pub mod ricci_k;
mod rng;
pub mod suites;
pub mod tensor;
pub mod zoo;

pub use decompose::{orthogonal_decompose, schouten, weyl, DecomposedCurvature};
pub use error::{Error, Result};
pub use linalg::{SymEigen, SymMatrix};
pub use operator::{BivectorIndex, BivectorMatrix, SpectralSummary};
pub use tensor::{CurvatureTensor, Frame, SymTwoTensor};

/// Default relative tolerance for validation and identity checks.
pub const DEFAULT_TOL: f64 = 1e-9;
