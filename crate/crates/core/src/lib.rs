//! One-bit compressed sensing with designable quantization thresholds.
//!
//! The encoder keeps each real-valued measurement `y_i = a_i'x` to itself and
//! publishes only `b_i = sign(y_i - tau_i)` for a threshold vector `tau` of the
//! caller's choosing. Setting `tau` close to `y` makes the reconstruction error
//! of a sign-consistent sparse decoder proportional to the threshold deviation,
//! which is what the modules here implement and verify:
//!
//! - [`model`]: signal/matrix/deviation generators, measurement, quantization.
//! - [`lpcore`]: a dense two-phase primal simplex engine used by every decoder.
//! - [`decoders`]: l1, weighted l1, log-sum (reweighted) and brute-force l0
//!   recovery under sign-consistency constraints.
//! - [`adaptive`]: the closed-loop threshold-refinement scheme in which the
//!   decoder's current reconstruction sets the next round's thresholds.
//! - [`theory`]: the submatrix constant mu, the measurement-count condition,
//!   the error bound `||xhat - x|| <= eps/sqrt(mu)`, and the orthant bound.
//!
//! All numeric kernels are generic over the scalar type via [`Scalar`];
//! concrete aliases at the crate root pin the default `f64` precision used by
//! the experiment harness.

// `!(x > 0)` deliberately rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod decoders;
pub mod error;
pub mod linalg;
pub mod lpcore;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod theory;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use scalar::Scalar;

/// Default scalar type: all experiment-facing code stores 64-bit floats.
pub type Real = f64;

/// Ground-truth K-sparse signal at default precision.
pub type Signal = model::SparseSignal<Real>;
/// Sensing matrix at default precision.
pub type Ensemble = model::SensingEnsemble<Real>;
/// Deviation specification at default precision.
pub type Deviation = model::DeviationSpec<Real>;
/// One encoder query (thresholds, optional deviation, bits) at default precision.
pub type Round = model::QuantizationRound<Real>;
/// Decoder output at default precision.
pub type Decode = decoders::DecodeResult<Real>;
