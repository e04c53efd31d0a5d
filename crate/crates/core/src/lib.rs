//! Simulation of harmonizable symmetric α-stable random fields through their
//! wavelet-series representation, with the kernels, coefficient samplers and
//! empirical regularity diagnostics needed to check the series numerically.
//!
//! The crate is `no_std` (it needs `alloc`); elementary functions come from
//! `libm`.  Enabling the `parallel` feature evaluates lattices with rayon.
//! Every lattice value is computed by the same sequence of floating-point
//! operations whatever the thread count, so results are bit-identical across
//! worker counts.
//!
//! Fourier convention: `ĝ(ξ) = ∫ e^{-iξ·x} g(x) dx`; the inverse transform
//! carries the factor `(2π)^{-d}`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod density;
pub mod error;
pub mod kernel;
pub mod lattice;
pub mod lemmas;
pub mod lepage;
mod math;
pub mod quadrature;
pub mod regularity;
pub mod rng;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
