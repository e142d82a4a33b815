//! Special functions and quadrature rules used across the crate.

pub mod bessel;
pub mod laguerre;
pub mod quadrature;

pub use bessel::bessel_j1;
pub use laguerre::{laguerre_band, laguerre_sequence};
pub use quadrature::{gauss_legendre, PolarRule};
