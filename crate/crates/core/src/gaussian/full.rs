use super::linalg::{self, Cholesky, SYMMETRY_TOL};
use crate::error::{Error, Result};
use crate::numerics::Tensor2;
use crate::scalar::Scalar;

/// Multivariate Gaussian in mean/precision form.
#[derive(Clone, Debug, PartialEq)]
pub struct FullGaussian<T> {
    mean: Vec<T>,
    precision: Tensor2<T>,
    chol: Cholesky<T>,
}

impl<T: Scalar> FullGaussian<T> {
    pub fn new(mean: Vec<T>, precision: Tensor2<T>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::Empty("FullGaussian dimension"));
        }
        if precision.shape() != (d, d) {
            return Err(Error::shape(
                "FullGaussian",
                format!("mean dim {d} vs precision {}x{}", precision.rows(), precision.cols()),
            ));
        }
        if !linalg::is_symmetric(&precision, T::lit(SYMMETRY_TOL)) {
            return Err(Error::NotSpd("precision not symmetric"));
        }
        let chol = Cholesky::new(&precision, "precision")?;
        Ok(Self {
            mean,
            precision,
            chol,
        })
    }

    pub fn from_covariance(mean: Vec<T>, cov: &Tensor2<T>) -> Result<Self> {
        if !linalg::is_symmetric(cov, T::lit(SYMMETRY_TOL)) {
            return Err(Error::NotSpd("covariance not symmetric"));
        }
        let prec = Cholesky::new(cov, "covariance")?.inverse();
        Self::new(mean, prec)
    }

    pub fn standard(dim: usize) -> Self {
        Self::new(vec![T::zero(); dim], Tensor2::identity(dim)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn precision(&self) -> &Tensor2<T> {
        &self.precision
    }

    pub fn covariance(&self) -> Tensor2<T> {
        self.chol.inverse()
    }

    /// `ln det Λ`.
    pub fn log_det_precision(&self) -> T {
        self.chol.log_det()
    }

    pub fn log_pdf(&self, x: &[T]) -> T {
        let diff: Vec<T> = x.iter().zip(&self.mean).map(|(&a, &b)| a - b).collect();
        let half = T::lit(0.5);
        let d = T::from_usize_lossy(self.dim());
        half * (self.log_det_precision() - d * (T::lit(2.0) * T::PI()).ln())
            - half * linalg::quad_form(&self.precision, &diff)
    }

    pub(crate) fn check_dims(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::shape(op, format!("dim {} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

/// Normalized Gaussian proportional to the pointwise product of the inputs.
///
/// Precision adds up, `Λ* = Σ Λᵢ`; the mean is the precision-weighted
/// average `μ* = Λ*⁻¹ Σ Λᵢ μᵢ`.
pub fn product_of_gaussians<T: Scalar>(gs: &[FullGaussian<T>]) -> Result<FullGaussian<T>> {
    let first = gs.first().ok_or(Error::Empty("product_of_gaussians"))?;
    let d = first.dim();
    let mut prec = Tensor2::zeros(d, d);
    let mut h = vec![T::zero(); d];
    for g in gs {
        first.check_dims(g, "product_of_gaussians")?;
        linalg::add_scaled(&mut prec, &g.precision, T::one());
        for (acc, v) in h.iter_mut().zip(linalg::mat_vec(&g.precision, &g.mean)) {
            *acc = *acc + v;
        }
    }
    let prec = linalg::symmetrize(&prec);
    let chol = Cholesky::new(&prec, "product precision")?;
    let mean = chol.solve(&h);
    FullGaussian::new(mean, prec)
}

/// `KL(g ‖ N(0, I))` with `g` given by mean and precision.
///
/// `½(−ln det Σ + tr Σ + μᵀμ − D)` where `Σ = Λ⁻¹`.
pub fn kl_full_to_standard<T: Scalar>(g: &FullGaussian<T>) -> Result<T> {
    let cov = g.covariance();
    let tr: T = (0..g.dim()).map(|i| cov[(i, i)]).sum();
    let mm: T = g.mean.iter().map(|&m| m * m).sum();
    let d = T::from_usize_lossy(g.dim());
    Ok(T::lit(0.5) * (g.log_det_precision() + tr + mm - d))
}

/// General `KL(q ‖ p)` between full Gaussians.
pub fn kl_full<T: Scalar>(q: &FullGaussian<T>, p: &FullGaussian<T>) -> Result<T> {
    q.check_dims(p, "kl_full")?;
    let diff: Vec<T> = p.mean.iter().zip(&q.mean).map(|(&a, &b)| a - b).collect();
    let tr = linalg::trace_of_product(&p.precision, &q.covariance());
    let d = T::from_usize_lossy(q.dim());
    Ok(T::lit(0.5)
        * (tr + linalg::quad_form(&p.precision, &diff) - d - p.log_det_precision()
            + q.log_det_precision()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_standard_normals() {
        let g = FullGaussian::<f64>::standard(3);
        let p = product_of_gaussians(&[g.clone(), g]).unwrap();
        assert!(p.precision().max_abs_diff(&Tensor2::identity(3).scale(2.0)) < 1e-15);
        assert!(p.mean().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn product_of_one_is_identity_map() {
        let g = FullGaussian::new(
            vec![0.5, -1.0],
            Tensor2::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap(),
        )
        .unwrap();
        let p = product_of_gaussians(std::slice::from_ref(&g)).unwrap();
        assert!(p.precision().max_abs_diff(g.precision()) < 1e-15);
        for (a, b) in p.mean().iter().zip(g.mean()) {
            let d: f64 = *a - *b;
            assert!(d.abs() < 1e-15);
        }
    }

    #[test]
    fn empty_product_is_error() {
        assert!(product_of_gaussians::<f64>(&[]).is_err());
    }

    #[test]
    fn kl_standard_cases() {
        let g = FullGaussian::<f64>::standard(4);
        assert!(kl_full_to_standard(&g).unwrap().abs() < 1e-15);
        let m = vec![1.0, -2.0, 0.5];
        let shifted = FullGaussian::new(m.clone(), Tensor2::identity(3)).unwrap();
        let half_norm = 0.5 * m.iter().map(|v| v * v).sum::<f64>();
        assert!((kl_full_to_standard(&shifted).unwrap() - half_norm).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_precision_rejected() {
        let p = Tensor2::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).unwrap();
        assert_eq!(
            FullGaussian::new(vec![0.0, 0.0], p),
            Err(Error::NotSpd("precision not symmetric"))
        );
    }
}
