//! Geometric stable (GS) laws and processes.
//!
//! Characteristic functions and densities of stable, Gamma and GS laws,
//! FFT inversion, fractional operators (spectral, quadrature and
//! Grünwald-Letnikov), samplers and residual checks of the fractional
//! equations these laws satisfy.

pub mod error;
pub mod fracops;
pub mod gslaw;
pub mod quad;
pub mod sampling;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
