//! Spectral structure of the finite-depth square well.
//!
//! Real bound states, complex-conjugate resonance pairs, threshold
//! (exceptional) modes, real-axis scattering, the one-dimensional well,
//! finite-dimensional pseudo-Hermitian algebra and the Pais-Uhlenbeck
//! eigenfunction check.
//!
//! Internally every solver works with the dimensionless interior wavenumber
//! `x = K a` and the depth parameter `X = gamma * sqrt(V0)`, so results in
//! physical units follow from [`WellSpec::energy_unit`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod error;
pub mod exceptional;
pub mod pt;
pub mod pu;
pub mod resonance;
pub mod scattering;
pub mod spectral;
pub mod well1d;

pub use error::{Error, Result};
pub use spectral::{ComplexEnergy, Geometry, WellSpec};
