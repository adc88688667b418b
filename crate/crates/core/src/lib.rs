//! Numerical laboratory for directional maximal operators on the periodic
//! square `[0, side)²` sampled on a `2^L × 2^L` lattice.
//!
//! Frequencies are integers in cycles per side; symbols and windows are
//! evaluated at physical frequency `(v·(ξ, η)) / side`, which keeps every
//! scaling experiment independent of the chosen side length.

pub mod directions;
pub mod dyadic;
pub mod error;
pub mod maximal;
pub mod norm_lab;
pub mod quadrature;
pub mod sectors;
pub mod spectral;

pub(crate) mod rng;

pub use directions::{DirectionKind, DirectionSet};
pub use error::{DmaxError, Result};
pub use maximal::MaximalOutput;
pub use spectral::{GridFunction, LpFamily, SmoothWindow, Spectrum, Symbol1D};

pub use num_complex::Complex64;
