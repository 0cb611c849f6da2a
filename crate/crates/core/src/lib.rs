//! Invariant Riemann-Roch numbers of prequantized Hamiltonian circle
//! manifolds, computed from fixed-point data.

use std::fmt::Debug;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst};

pub mod builtins;
pub mod error;
pub mod jet;
pub mod localization;
pub mod model;
pub mod oracle;
pub mod quantize;
pub mod ring;
pub mod witten;
pub mod zrational;

pub use error::{Error, Result};

/// Floating scalar used by the numeric routines.
pub trait Real: Float + FloatConst + Debug + Send + Sync + 'static {}

impl<T: Float + FloatConst + Debug + Send + Sync + 'static> Real for T {}

/// Exact graded cohomology element.
pub type GradedQ = ring::GradedElement<BigRational>;
/// Graded element with double-precision complex coefficients.
pub type GradedC = ring::GradedElement<Complex<f64>>;
/// Double-precision complex number.
pub type C64 = Complex<f64>;
