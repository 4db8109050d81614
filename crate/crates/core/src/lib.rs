#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]
//! Pseudo-spectral laboratory for incompressible MHD on the periodic torus.
//!
//! The crate is `no_std` with `alloc`: everything here is pure computation
//! on in-memory fields. File formats, the command line, and threaded sweep
//! execution live in the companion `mhdlab` crate.
//!
//! Layers, bottom up:
//! - [`grid`], [`field`], [`spectral`]: torus grid, FFT-backed fields,
//!   Fourier-multiplier operators, dealiased products.
//! - [`lp`]: dyadic filter bank, Besov and Sobolev norms, paraproducts,
//!   commutators, and empirical inequality constants.
//! - [`solver`]: integrating-factor RK4 for viscous/ideal MHD, the Elsässer
//!   form, and scalar transport-diffusion.
//! - [`experiments`]: difference metrics, viscosity and data sweeps with
//!   slope fits, the mollification split, envelope diagnostics.
//! - [`data`]: counter-based seeded generation of solenoidal random data.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod data;
pub mod error;
pub mod exec;
pub mod experiments;
mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod solver;
pub mod spectral;

pub use error::{DataError, ExperimentError, LpError, SolveError, SpectralError};
pub use field::{Components, SpectralField, VectorField};
pub use grid::{make_grid, TorusGrid};
