//! Closed-form Gaussian algebra: products, KL divergences and
//! skew-geometric JS divergences, plus categorical entropy.

mod diag;
mod entropy;
mod full;
pub mod linalg;
mod skew;
mod var;

pub use diag::{kl_diag, DiagGaussian};
pub use entropy::{entropy_categorical, LogBase, NORMALIZATION_TOL};
pub use full::{kl_full, kl_full_to_standard, product_of_gaussians, FullGaussian};
pub use skew::{
    alpha_u, geometric_mixture, js_skew, js_skew_dual, js_skew_dual_via_kl, js_skew_via_kl,
    GeometricMixture, SkewGeometric,
};
pub use var::{js_skew_dual_var, js_skew_var, kl_diag_var, DiagGaussianVar};
