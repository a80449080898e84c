use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Logarithm base for entropies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    /// Bits.
    #[default]
    Two,
    /// Nats.
    E,
}

impl LogBase {
    pub fn log<T: Scalar>(self, x: T) -> T {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }

    /// Maximum entropy of a distribution over `classes` outcomes.
    pub fn max_entropy<T: Scalar>(self, classes: usize) -> T {
        self.log(T::from_usize_lossy(classes))
    }
}

/// Tolerance on `Σ p − 1` accepted by [`entropy_categorical`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// `−Σ p log p` with `0 log 0 = 0`.
pub fn entropy_categorical<T: Scalar>(p: &[T], base: LogBase) -> Result<T> {
    let total: T = p.iter().copied().sum();
    if p.iter().any(|&v| v < T::zero() || !v.is_finite())
        || (total - T::one()).abs() > T::lit(NORMALIZATION_TOL)
    {
        return Err(Error::NotNormalized(total.to_f64_lossy()));
    }
    let h: T = p
        .iter()
        .filter(|&&v| v > T::zero())
        .map(|&v| -v * base.log(v))
        .sum();
    Ok(h.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot_is_zero() {
        assert_eq!(entropy_categorical(&[0.0, 1.0, 0.0], LogBase::Two).unwrap(), 0.0);
    }

    #[test]
    fn uniform_four_is_two_bits() {
        let h = entropy_categorical(&[0.25f64; 4], LogBase::Two).unwrap();
        assert!((h - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(matches!(
            entropy_categorical(&[0.5, 0.6], LogBase::E),
            Err(Error::NotNormalized(_))
        ));
    }
}
