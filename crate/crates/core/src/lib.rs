//! Nonclassicality of single-mode bosonic states through the universal
//! witness family `Ŵ_w(α)`.
//!
//! The crate evaluates filtered P functions two ways: from (displaced)
//! photon statistics with exact Fock-diagonal witness elements, and by
//! direct quadrature of the filtered characteristic function. Baseline
//! tests (sub-Poissonian statistics, squeezing, first-order characteristic
//! function bound, Wigner negativity) are provided for comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod filters;
pub mod fock;
pub mod nfp;
pub mod point;
pub mod special;
pub mod transform;
pub mod witness;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, FockSpace, PhotonStatistics};
pub use point::ComplexPoint;
pub use transform::QuadConfig;
