//! Wick rotation of non-self-adjoint Dirac-type operators and finite-truncation
//! diagnostics for pseudo-Riemannian spectral triples.
//!
//! The crate works with dense compressions of unbounded operators. From a
//! closed, non-self-adjoint `D` it builds `⟨D⟩² = ½(DD* + D*D)`, the defect
//! `R_D = (i/2)(D² − D*²)` and the Hermitian Wick rotation
//! `D_E = (e^{iπ/4}/√2)(D − iD*)`, then measures the summability, order and
//! index quantities attached to them.

pub mod analysis;
pub mod clifford;
pub mod error;
pub mod exec;
pub mod index;
pub mod linalg;
pub mod models;
pub mod operator;
pub mod quadrature;
pub mod verifier;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linalg::{c64, CMat};
pub use operator::{DerivedOperators, FundamentalSymmetry, Orientation, TruncatedOperator};
