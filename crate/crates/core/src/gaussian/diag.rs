use serde::{Deserialize, Serialize};

use super::full::FullGaussian;
use crate::error::{Error, Result};
use crate::numerics::Tensor2;
use crate::scalar::Scalar;

/// Gaussian with independent components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagGaussian<T> {
    mean: Vec<T>,
    var: Vec<T>,
}

impl<T: Scalar> DiagGaussian<T> {
    pub fn new(mean: Vec<T>, var: Vec<T>) -> Result<Self> {
        if mean.len() != var.len() {
            return Err(Error::shape(
                "DiagGaussian",
                format!("mean dim {} vs var dim {}", mean.len(), var.len()),
            ));
        }
        if mean.is_empty() {
            return Err(Error::Empty("DiagGaussian dimension"));
        }
        if var.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(Error::invalid("DiagGaussian variance must be positive and finite"));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite("DiagGaussian mean"));
        }
        Ok(Self { mean, var })
    }

    pub fn standard(dim: usize) -> Self {
        Self {
            mean: vec![T::zero(); dim],
            var: vec![T::one(); dim],
        }
    }

    /// Builds from mean and standard deviation vectors.
    pub fn from_std(mean: Vec<T>, std: &[T]) -> Result<Self> {
        Self::new(mean, std.iter().map(|&s| s * s).collect())
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn var(&self) -> &[T] {
        &self.var
    }

    pub fn std(&self) -> Vec<T> {
        self.var.iter().map(|v| v.sqrt()).collect()
    }

    pub fn log_pdf(&self, x: &[T]) -> T {
        let half = T::lit(0.5);
        let ln2pi = (T::lit(2.0) * T::PI()).ln();
        self.mean
            .iter()
            .zip(&self.var)
            .zip(x)
            .map(|((&m, &v), &xi)| -half * (ln2pi + v.ln() + (xi - m) * (xi - m) / v))
            .sum()
    }

    /// `z = μ + σ ⊙ ε` for each row of `noise`.
    pub fn reparameterize(&self, noise: &Tensor2<T>) -> Result<Tensor2<T>> {
        if noise.cols() != self.dim() {
            return Err(Error::shape(
                "reparameterize",
                format!("noise dim {} vs {}", noise.cols(), self.dim()),
            ));
        }
        let std = self.std();
        Ok(Tensor2::from_fn(noise.rows(), noise.cols(), |i, j| {
            self.mean[j] + std[j] * noise[(i, j)]
        }))
    }

    pub fn to_full(&self) -> FullGaussian<T> {
        let n = self.dim();
        let prec = Tensor2::from_fn(n, n, |i, j| {
            if i == j {
                self.var[i].recip()
            } else {
                T::zero()
            }
        });
        FullGaussian::new(self.mean.clone(), prec).expect("diagonal precision is SPD")
    }

    pub(crate) fn check_dims(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::shape(op, format!("dim {} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

/// `KL(q ‖ p)` between diagonal Gaussians.
pub fn kl_diag<T: Scalar>(q: &DiagGaussian<T>, p: &DiagGaussian<T>) -> Result<T> {
    q.check_dims(p, "kl_diag")?;
    let half = T::lit(0.5);
    let s: T = q
        .mean
        .iter()
        .zip(&q.var)
        .zip(p.mean.iter().zip(&p.var))
        .map(|((&mq, &vq), (&mp, &vp))| {
            let d = mp - mq;
            (vp / vq).ln() + vq / vp - T::one() + d * d / vp
        })
        .sum();
    Ok(half * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kl_of_identical_is_zero() {
        let g = DiagGaussian::new(vec![0.3, -1.0], vec![0.5, 2.0]).unwrap();
        assert_eq!(kl_diag(&g, &g).unwrap(), 0.0);
    }

    #[test]
    fn kl_to_standard_is_independent_components_form() {
        // against a standard-normal prior: ½ Σ (σ² + μ² − 1 − ln σ²)
        let q = DiagGaussian::new(vec![0.4, -0.7, 1.1], vec![0.3, 1.7, 0.9]).unwrap();
        let p = DiagGaussian::standard(3);
        let ic: f64 = q
            .mean()
            .iter()
            .zip(q.var())
            .map(|(m, &v): (&f64, &f64)| 0.5 * (v + m * m - 1.0 - v.ln()))
            .sum();
        assert!((kl_diag(&q, &p).unwrap() - ic).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DiagGaussian::<f64>::standard(2);
        let b = DiagGaussian::<f64>::standard(3);
        assert!(matches!(kl_diag(&a, &b), Err(Error::Shape { .. })));
    }

    #[test]
    fn rejects_nonpositive_variance() {
        assert!(DiagGaussian::new(vec![0.0], vec![0.0_f64]).is_err());
    }

    #[test]
    fn zero_noise_gives_mean() {
        let g = DiagGaussian::new(vec![1.5, -2.0], vec![4.0, 0.25]).unwrap();
        let z = g.reparameterize(&Tensor2::zeros(3, 2)).unwrap();
        for r in z.iter_rows() {
            assert_eq!(r, g.mean());
        }
    }
}
