//! Stationary laws of random affine recursions `X_{n+1} = A_{n+1} X_n + B_{n+1}` with
//! finitely supported coefficient laws: growth rates, tail index, sampling, tail
//! diagnostics and structural classification.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

// `!(x > 0)` is deliberate: it rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod io;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod serde_ext;
pub mod simulate;
pub mod spectral;
pub mod sphere;
pub mod stats;
pub mod structure;
pub mod tails;

pub use rng::Seed;
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type AffineMap64 = model::AffineMap<f64>;
pub type AffineMeasure64 = model::AffineMeasure<f64>;
pub type LinearMeasure64 = model::LinearMeasure<f64>;
