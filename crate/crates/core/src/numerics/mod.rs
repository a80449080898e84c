//! Dense tensors, a reverse-mode tape, MLPs and SGD.

mod mlp;
mod optim;
mod params;
mod tape;
mod tensor;

pub use mlp::{Activation, Mlp};
pub use optim::{cosine_lr, Sgd};
pub use params::{ParamId, ParamStore};
pub use tape::{Tape, Var};
pub use tensor::{softmax_rows_plain, Tensor2};

pub(crate) use tape::attention_forward;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Probability floor used inside cross-entropy.
pub const LOG_CLAMP_EPS: f64 = 1e-12;

/// Floor added after softplus when producing standard deviations.
pub const STD_FLOOR: f64 = 1e-6;

/// Row-wise softmax recorded on the tape.
pub fn softmax_rows<T: Scalar>(tape: &mut Tape<T>, logits: Var) -> Result<Var> {
    tape.softmax_rows(logits)
}

/// Mean negative log-likelihood of `labels` under row-normalized `probs`.
pub fn cross_entropy<T: Scalar>(tape: &mut Tape<T>, probs: Var, labels: &[usize]) -> Result<Var> {
    tape.cross_entropy(probs, labels, T::lit(LOG_CLAMP_EPS))
}

/// `z = μ + σ ⊙ ε` for every row of `noise`.
///
/// `mean` and `std` are `n x D`; `noise` is `(k n) x D` and row `t n + i`
/// of the result pairs noise row `t n + i` with distribution row `i`.
/// The noise is a constant: no gradient flows into it.
pub fn reparameterize<T: Scalar>(
    tape: &mut Tape<T>,
    mean: Var,
    std: Var,
    noise: &Tensor2<T>,
) -> Result<Var> {
    let (n, d) = tape.value(mean).shape();
    if tape.value(std).shape() != (n, d) {
        return Err(Error::shape("reparameterize", "mean and std shapes differ"));
    }
    if n == 0 || noise.cols() != d || !noise.rows().is_multiple_of(n) {
        return Err(Error::shape(
            "reparameterize",
            format!("noise {}x{} for {n}x{d} distribution", noise.rows(), noise.cols()),
        ));
    }
    if tape.value(std).data().iter().any(|&s| !(s > T::zero())) {
        return Err(Error::invalid("reparameterize requires sigma > 0"));
    }
    let k = noise.rows() / n;
    let mu = tape.tile_rows(mean, k);
    let sd = tape.tile_rows(std, k);
    let eps = tape.constant(noise.clone());
    let scaled = tape.mul(sd, eps)?;
    tape.add(mu, scaled)
}

/// `softplus(raw) + STD_FLOOR`, the positivity map for standard deviations.
pub fn positive_std<T: Scalar>(tape: &mut Tape<T>, raw: Var) -> Var {
    let sp = tape.softplus(raw);
    tape.add_scalar(sp, T::lit(STD_FLOOR))
}
