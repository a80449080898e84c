use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::config::AugmentConfig;
use crate::numerics::Tensor2;
use crate::scalar::Scalar;

/// Additive Gaussian noise with standard deviation `sigma`.
pub fn weak_augment<T: Scalar, R: Rng + ?Sized>(x: &[T], sigma: f64, rng: &mut R) -> Vec<T> {
    if sigma == 0.0 {
        return x.to_vec();
    }
    let noise = Normal::new(0.0, sigma).expect("sigma validated");
    x.iter().map(|&v| v + T::lit(noise.sample(rng))).collect()
}

/// Additive Gaussian noise followed by zeroing each feature with probability `drop`.
pub fn strong_augment<T: Scalar, R: Rng + ?Sized>(x: &[T], sigma: f64, drop: f64, rng: &mut R) -> Vec<T> {
    let mut out = weak_augment(x, sigma, rng);
    if drop > 0.0 {
        for v in &mut out {
            if rng.random_bool(drop) {
                *v = T::zero();
            }
        }
    }
    out
}

pub fn weak_augment_rows<T: Scalar, R: Rng + ?Sized>(x: &Tensor2<T>, cfg: &AugmentConfig, rng: &mut R) -> Tensor2<T> {
    map_rows(x, |r| weak_augment(r, cfg.weak_sigma, rng))
}

pub fn strong_augment_rows<T: Scalar, R: Rng + ?Sized>(x: &Tensor2<T>, cfg: &AugmentConfig, rng: &mut R) -> Tensor2<T> {
    map_rows(x, |r| strong_augment(r, cfg.strong_sigma, cfg.strong_drop, rng))
}

fn map_rows<T: Scalar>(x: &Tensor2<T>, f: impl FnMut(&[T]) -> Vec<T>) -> Tensor2<T> {
    let data: Vec<T> = x.iter_rows().flat_map(f).collect();
    Tensor2::new(x.rows(), x.cols(), data).expect("row length preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn zero_sigma_is_identity() {
        let x = [0.3, -1.2, 4.0];
        assert_eq!(weak_augment(&x, 0.0, &mut rng_from_seed(0)), x.to_vec());
        assert_eq!(strong_augment(&x, 0.0, 0.0, &mut rng_from_seed(0)), x.to_vec());
    }

    #[test]
    fn seeded_output_reproducible() {
        let x = [0.3, -1.2, 4.0];
        let a = strong_augment(&x, 0.2, 0.3, &mut rng_from_seed(5));
        let b = strong_augment(&x, 0.2, 0.3, &mut rng_from_seed(5));
        assert_eq!(a, b);
    }

    #[test]
    fn full_drop_zeroes_everything() {
        let out = strong_augment(&[1.0, 2.0], 0.1, 1.0, &mut rng_from_seed(1));
        assert_eq!(out, vec![0.0, 0.0]);
    }
}
