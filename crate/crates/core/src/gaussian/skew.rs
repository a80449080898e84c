//! Skew-geometric Jensen-Shannon divergences between Gaussians.
//!
//! The intermediate distribution is the normalized weighted geometric mean
//! `N_α ∝ N₁^{1−α} N₂^{α}`, itself Gaussian with
//! `Σ_α⁻¹ = (1−α)Σ₁⁻¹ + αΣ₂⁻¹` and
//! `μ_α = Σ_α((1−α)Σ₁⁻¹μ₁ + αΣ₂⁻¹μ₂)`.
//!
//! * `js_skew(N₁, N₂, α) = (1−α) KL(N₁‖N_α) + α KL(N₂‖N_α)`
//! * `js_skew_dual(N₁, N₂, α) = (1−α) KL(N_α‖N₁) + α KL(N_α‖N₂)`
//!
//! Both are evaluated in closed form; [`js_skew_via_kl`] and
//! [`js_skew_dual_via_kl`] compose the same quantity from exact KL terms
//! and are kept for cross-checking.

use super::diag::{kl_diag, DiagGaussian};
use super::full::{kl_full, FullGaussian};
use super::linalg::{self, Cholesky};
use crate::error::{Error, Result};
use crate::numerics::Tensor2;
use crate::scalar::Scalar;

/// The intermediate Gaussian `N_α` together with its skew.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricMixture<T, G> {
    pub gaussian: G,
    pub alpha: T,
}

/// Gaussian families closed under weighted geometric means.
pub trait SkewGeometric<T: Scalar>: Sized + Clone {
    fn dimension(&self) -> usize;

    /// `N_α` for `α ∈ [0, 1]`; the endpoints return the inputs unchanged.
    fn weighted_geometric_mean(&self, other: &Self, alpha: T) -> Result<Self>;

    /// `KL(self ‖ other)`.
    fn kl(&self, other: &Self) -> Result<T>;

    fn js_skew_closed(&self, other: &Self, alpha: T) -> Result<T>;

    fn js_skew_dual_closed(&self, other: &Self, alpha: T) -> Result<T>;
}

pub(crate) fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(Error::invalid(format!("skew alpha {alpha} outside [0, 1]")));
    }
    Ok(())
}

pub fn geometric_mixture<T: Scalar, G: SkewGeometric<T>>(
    n1: &G,
    n2: &G,
    alpha: T,
) -> Result<GeometricMixture<T, G>> {
    check_alpha(alpha)?;
    Ok(GeometricMixture {
        gaussian: n1.weighted_geometric_mean(n2, alpha)?,
        alpha,
    })
}

/// Uncertainty-guided skew-geometric JS divergence, closed form.
pub fn js_skew<T: Scalar, G: SkewGeometric<T>>(n1: &G, n2: &G, alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    n1.js_skew_closed(n2, alpha)
}

/// Dual form (KL directions reversed), closed form.
pub fn js_skew_dual<T: Scalar, G: SkewGeometric<T>>(n1: &G, n2: &G, alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    n1.js_skew_dual_closed(n2, alpha)
}

pub fn js_skew_via_kl<T: Scalar, G: SkewGeometric<T>>(n1: &G, n2: &G, alpha: T) -> Result<T> {
    let m = geometric_mixture(n1, n2, alpha)?.gaussian;
    Ok((T::one() - alpha) * n1.kl(&m)? + alpha * n2.kl(&m)?)
}

pub fn js_skew_dual_via_kl<T: Scalar, G: SkewGeometric<T>>(
    n1: &G,
    n2: &G,
    alpha: T,
) -> Result<T> {
    let m = geometric_mixture(n1, n2, alpha)?.gaussian;
    Ok((T::one() - alpha) * m.kl(n1)? + alpha * m.kl(n2)?)
}

/// `α_u = u_c / (u_c + u_t)`; both zero falls back to `0.5`.
pub fn alpha_u<T: Scalar>(uc_avg: T, ut_avg: T) -> Result<T> {
    if !(uc_avg >= T::zero()) || !(ut_avg >= T::zero()) || !uc_avg.is_finite() || !ut_avg.is_finite()
    {
        return Err(Error::invalid(format!(
            "uncertainties must be finite and nonnegative, got {uc_avg} and {ut_avg}"
        )));
    }
    let total = uc_avg + ut_avg;
    if total == T::zero() {
        return Ok(T::lit(0.5));
    }
    Ok(uc_avg / total)
}

struct DiagMix<T> {
    prec: T,
    var: T,
    mean: T,
}

#[inline]
fn diag_mix<T: Scalar>(m1: T, v1: T, m2: T, v2: T, alpha: T) -> DiagMix<T> {
    let beta = T::one() - alpha;
    let prec = beta / v1 + alpha / v2;
    let var = prec.recip();
    let mean = var * (beta * m1 / v1 + alpha * m2 / v2);
    DiagMix { prec, var, mean }
}

impl<T: Scalar> SkewGeometric<T> for DiagGaussian<T> {
    fn dimension(&self) -> usize {
        self.dim()
    }

    fn weighted_geometric_mean(&self, other: &Self, alpha: T) -> Result<Self> {
        self.check_dims(other, "geometric_mixture")?;
        check_alpha(alpha)?;
        if alpha == T::zero() {
            return Ok(self.clone());
        }
        if alpha == T::one() {
            return Ok(other.clone());
        }
        let (mut mean, mut var) = (Vec::with_capacity(self.dim()), Vec::with_capacity(self.dim()));
        for i in 0..self.dim() {
            let mix = diag_mix(self.mean()[i], self.var()[i], other.mean()[i], other.var()[i], alpha);
            mean.push(mix.mean);
            var.push(mix.var);
        }
        DiagGaussian::new(mean, var)
    }

    fn kl(&self, other: &Self) -> Result<T> {
        kl_diag(self, other)
    }

    fn js_skew_closed(&self, other: &Self, alpha: T) -> Result<T> {
        self.check_dims(other, "js_skew")?;
        let beta = T::one() - alpha;
        let mut s = T::zero();
        for i in 0..self.dim() {
            let (m1, v1, m2, v2) = (self.mean()[i], self.var()[i], other.mean()[i], other.var()[i]);
            let mix = diag_mix(m1, v1, m2, v2, alpha);
            let (d1, d2) = (mix.mean - m1, mix.mean - m2);
            s = s + mix.prec * (beta * v1 + alpha * v2)
                + beta * mix.prec * d1 * d1
                + alpha * mix.prec * d2 * d2
                + mix.var.ln()
                - beta * v1.ln()
                - alpha * v2.ln()
                - T::one();
        }
        Ok(T::lit(0.5) * s)
    }

    fn js_skew_dual_closed(&self, other: &Self, alpha: T) -> Result<T> {
        self.check_dims(other, "js_skew_dual")?;
        let beta = T::one() - alpha;
        let mut s = T::zero();
        for i in 0..self.dim() {
            let (m1, v1, m2, v2) = (self.mean()[i], self.var()[i], other.mean()[i], other.var()[i]);
            let mix = diag_mix(m1, v1, m2, v2, alpha);
            s = s + beta * v1.ln() + alpha * v2.ln() - mix.var.ln() + beta * m1 * m1 / v1
                + alpha * m2 * m2 / v2
                - mix.mean * mix.mean * mix.prec;
        }
        Ok(T::lit(0.5) * s)
    }
}

struct FullMix<T> {
    prec: Tensor2<T>,
    chol: Cholesky<T>,
    mean: Vec<T>,
}

fn full_mix<T: Scalar>(n1: &FullGaussian<T>, n2: &FullGaussian<T>, alpha: T) -> Result<FullMix<T>> {
    let beta = T::one() - alpha;
    let d = n1.dim();
    let mut prec = Tensor2::zeros(d, d);
    linalg::add_scaled(&mut prec, n1.precision(), beta);
    linalg::add_scaled(&mut prec, n2.precision(), alpha);
    let prec = linalg::symmetrize(&prec);
    let chol = Cholesky::new(&prec, "geometric mixture precision")?;
    let h: Vec<T> = linalg::mat_vec(n1.precision(), n1.mean())
        .into_iter()
        .zip(linalg::mat_vec(n2.precision(), n2.mean()))
        .map(|(a, b)| beta * a + alpha * b)
        .collect();
    let mean = chol.solve(&h);
    Ok(FullMix { prec, chol, mean })
}

impl<T: Scalar> SkewGeometric<T> for FullGaussian<T> {
    fn dimension(&self) -> usize {
        self.dim()
    }

    fn weighted_geometric_mean(&self, other: &Self, alpha: T) -> Result<Self> {
        self.check_dims(other, "geometric_mixture")?;
        check_alpha(alpha)?;
        if alpha == T::zero() {
            return Ok(self.clone());
        }
        if alpha == T::one() {
            return Ok(other.clone());
        }
        let mix = full_mix(self, other, alpha)?;
        FullGaussian::new(mix.mean, mix.prec)
    }

    fn kl(&self, other: &Self) -> Result<T> {
        kl_full(self, other)
    }

    fn js_skew_closed(&self, other: &Self, alpha: T) -> Result<T> {
        self.check_dims(other, "js_skew")?;
        let beta = T::one() - alpha;
        let mix = full_mix(self, other, alpha)?;
        let d = self.dim();
        let mut blend = Tensor2::zeros(d, d);
        linalg::add_scaled(&mut blend, &self.covariance(), beta);
        linalg::add_scaled(&mut blend, &other.covariance(), alpha);
        let d1: Vec<T> = mix.mean.iter().zip(self.mean()).map(|(&a, &b)| a - b).collect();
        let d2: Vec<T> = mix.mean.iter().zip(other.mean()).map(|(&a, &b)| a - b).collect();
        // ln det Σ_α − (1−α) ln det Σ₁ − α ln det Σ₂, written with precisions
        let log_ratio = -mix.chol.log_det()
            + beta * self.log_det_precision()
            + alpha * other.log_det_precision();
        Ok(T::lit(0.5)
            * (linalg::trace_of_product(&mix.prec, &blend)
                + beta * linalg::quad_form(&mix.prec, &d1)
                + alpha * linalg::quad_form(&mix.prec, &d2)
                + log_ratio
                - T::from_usize_lossy(d)))
    }

    fn js_skew_dual_closed(&self, other: &Self, alpha: T) -> Result<T> {
        self.check_dims(other, "js_skew_dual")?;
        let beta = T::one() - alpha;
        let mix = full_mix(self, other, alpha)?;
        let log_ratio = mix.chol.log_det()
            - beta * self.log_det_precision()
            - alpha * other.log_det_precision();
        Ok(T::lit(0.5)
            * (log_ratio + beta * linalg::quad_form(self.precision(), self.mean())
                + alpha * linalg::quad_form(other.precision(), other.mean())
                - linalg::quad_form(&mix.prec, &mix.mean)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> (DiagGaussian<f64>, DiagGaussian<f64>) {
        (
            DiagGaussian::new(vec![0.2, -0.5, 1.0, 0.0], vec![0.8, 1.3, 0.4, 2.0]).unwrap(),
            DiagGaussian::new(vec![-0.3, 0.4, 0.7, 1.2], vec![1.1, 0.6, 0.9, 0.5]).unwrap(),
        )
    }

    #[test]
    fn endpoints_are_exact() {
        let (a, b) = pair();
        assert_eq!(geometric_mixture(&a, &b, 0.0).unwrap().gaussian, a);
        assert_eq!(geometric_mixture(&a, &b, 1.0).unwrap().gaussian, b);
        let (fa, fb) = (a.to_full(), b.to_full());
        assert_eq!(geometric_mixture(&fa, &fb, 0.0).unwrap().gaussian, fa);
        assert_eq!(geometric_mixture(&fa, &fb, 1.0).unwrap().gaussian, fb);
    }

    #[test]
    fn identical_inputs_fixed_point() {
        let (a, _) = pair();
        for alpha in [0.1, 0.5, 0.9] {
            let m = geometric_mixture(&a, &a, alpha).unwrap().gaussian;
            for (x, y) in m.mean().iter().zip(a.mean()) {
                assert!((x - y).abs() < 1e-14);
            }
            for (x, y) in m.var().iter().zip(a.var()) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn alpha_out_of_range() {
        let (a, b) = pair();
        assert!(js_skew(&a, &b, -0.1).is_err());
        assert!(js_skew_dual(&a, &b, 1.5).is_err());
        assert!(geometric_mixture(&a, &b, f64::NAN).is_err());
    }

    #[test]
    fn alpha_u_cases() {
        assert_eq!(alpha_u(0.2, 0.2).unwrap(), 0.5);
        assert_eq!(alpha_u(0.0, 0.7).unwrap(), 0.0);
        assert!((alpha_u(0.3f64, 0.1).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(alpha_u(0.0, 0.0).unwrap(), 0.5);
        assert!(alpha_u(-0.1, 0.5).is_err());
    }

    #[test]
    fn closed_forms_match_composition() {
        let (a, b) = pair();
        let alpha = 0.3;
        let c = js_skew(&a, &b, alpha).unwrap();
        let k = js_skew_via_kl(&a, &b, alpha).unwrap();
        assert!((c - k).abs() < 1e-10, "{c} vs {k}");
        let c = js_skew_dual(&a, &b, alpha).unwrap();
        let k = js_skew_dual_via_kl(&a, &b, alpha).unwrap();
        assert!((c - k).abs() < 1e-10, "{c} vs {k}");
    }
}
