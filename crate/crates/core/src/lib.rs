//! Neural-process semi-supervised classification.
//!
//! * [`numerics`]: dense tensors, reverse-mode tape, MLPs, SGD.
//! * [`gaussian`]: Gaussian products, KL and skew-geometric JS divergences.
//! * [`np`]: the neural-process classifier with memory banks.
//! * [`ssl`]: pseudo-label gating, the three-term loss, EMA, MC dropout,
//!   and the training loop.
//! * [`metrics`]: error rate, expected UCE, PAvPU, latency benchmark.
//! * [`datasets`]: synthetic generators and semi-supervised splits.
//!
//! The numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! training pipeline uses.

pub mod datasets;
pub mod error;
pub mod gaussian;
pub mod metrics;
pub mod np;
pub mod numerics;
pub mod rng;
pub mod scalar;
pub mod ssl;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Tensor = numerics::Tensor2<f64>;
pub type Tape = numerics::Tape<f64>;
pub type ParamStore = numerics::ParamStore<f64>;
pub type DiagGaussian = gaussian::DiagGaussian<f64>;
pub type FullGaussian = gaussian::FullGaussian<f64>;
pub type NpModel = np::NpModel<f64>;
pub type Prediction = np::Prediction<f64>;
pub type McDropoutModel = ssl::McDropoutModel<f64>;

/// Crate version recorded in run manifests and checkpoints.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
