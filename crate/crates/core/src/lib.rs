//! Exact arithmetic for systems of homogeneous integral forms.
//!
//! The crate provides the algebraic layer for lattice-point counting
//! experiments on systems of forms of differing degrees: sparse
//! multivariate polynomials over arbitrary-precision integers, the
//! multilinear polar form and its row-vector contraction, Jacobian
//! matrices, and the exact-rational admissibility invariants
//! (`B_d`, `D_j`, `s_d`, `t_d`, `n_0`) that govern when the
//! Hardy-Littlewood main term is expected to hold.
//!
//! Everything here is pure computation over `alloc`; IO, floating-point
//! densities and enumeration kernels live in the companion `formcount`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod gf;
pub mod invariants;
pub mod poly;
pub mod forms;
pub mod system;

pub use error::CoreError;
pub use forms::{IntegerForm, Monomial, MultilinearForm};
pub use poly::Poly;
pub use system::{diagonal_form, BoxRegion, DegreeProfile, EquivalenceStep, FormSystem, MultiplierTerm};
