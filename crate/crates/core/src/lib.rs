//! Master field of two-dimensional Yang–Mills theory on a sphere of area `T`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats and the command line live in the
//! companion `masterfield-cli` crate.
//!
//! Modules, bottom-up:
//! - [`specfun`]: elliptic integrals, Gauss–Legendre / Gauss–Kronrod quadrature, contour integrals.
//! - [`equilibrium`]: the equilibrium density `ρ_T`, its Stieltjes transform and the midpoint duality.
//! - [`simple_field`]: `φ_T(n, a₁, a₂)` on powers of simple loops, planar limit, spectral densities.
//! - [`loop_model`]: combinatorial planar loops, winding numbers, Makeenko–Migdal vectors, splitting.
//! - [`master`]: `Φ_T` on regular loops by recursion and by the splittable-loop contour formula.
//! - [`oracle`]: finite-`N` character sums and a discrete β-ensemble sampler.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod equilibrium;
mod error;
pub mod loop_model;
pub mod master;
pub mod oracle;
pub mod simple_field;
pub mod specfun;

pub use error::{Error, Result, ValidationError};
