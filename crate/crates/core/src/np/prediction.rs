use crate::error::{Error, Result};
use crate::gaussian::{entropy_categorical, LogBase};
use crate::numerics::Tensor2;
use crate::scalar::Scalar;

/// Averaged class probabilities plus entropy uncertainty over `T` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction<T> {
    mean_probs: Tensor2<T>,
    uncertainty: Vec<T>,
    samples: Vec<Tensor2<T>>,
    base: LogBase,
}

impl<T: Scalar> Prediction<T> {
    /// Builds from stacked samples: row `t n + i` is sample `t` of item `i`.
    pub fn from_samples(stacked: &Tensor2<T>, t: usize, base: LogBase) -> Result<Self> {
        if t == 0 {
            return Err(Error::invalid("prediction needs at least one sample"));
        }
        if !stacked.rows().is_multiple_of(t) {
            return Err(Error::shape("prediction", format!("{} rows not divisible by T = {t}", stacked.rows())));
        }
        let n = stacked.rows() / t;
        let samples: Vec<Tensor2<T>> = (0..t)
            .map(|s| stacked.gather_rows(&(s * n..(s + 1) * n).collect::<Vec<_>>()))
            .collect();
        Self::from_sample_list(samples, base)
    }

    pub fn from_sample_list(samples: Vec<Tensor2<T>>, base: LogBase) -> Result<Self> {
        let first = samples.first().ok_or(Error::Empty("prediction samples"))?;
        let shape = first.shape();
        if samples.iter().any(|s| s.shape() != shape) {
            return Err(Error::shape("prediction", "samples differ in shape"));
        }
        let inv_t = T::one() / T::from_usize_lossy(samples.len());
        let mut mean = Tensor2::zeros(shape.0, shape.1);
        for s in &samples {
            mean.add_assign(s)?;
        }
        let mean = mean.scale(inv_t);
        let uncertainty = mean
            .iter_rows()
            .map(|r| entropy_categorical(r, base))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            mean_probs: mean,
            uncertainty,
            samples,
            base,
        })
    }

    pub fn len(&self) -> usize {
        self.mean_probs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_probs.rows() == 0
    }

    pub fn num_classes(&self) -> usize {
        self.mean_probs.cols()
    }

    pub fn mean_probs(&self) -> &Tensor2<T> {
        &self.mean_probs
    }

    pub fn uncertainty(&self) -> &[T] {
        &self.uncertainty
    }

    pub fn samples(&self) -> &[Tensor2<T>] {
        &self.samples
    }

    pub fn base(&self) -> LogBase {
        self.base
    }

    pub fn predicted_labels(&self) -> Vec<usize> {
        self.mean_probs.argmax_rows()
    }

    pub fn confidence(&self) -> Vec<T> {
        self.mean_probs
            .iter_rows()
            .map(|r| r.iter().copied().fold(T::neg_infinity(), T::max))
            .collect()
    }

    pub fn mean_uncertainty(&self) -> T {
        if self.uncertainty.is_empty() {
            return T::zero();
        }
        self.uncertainty.iter().copied().sum::<T>() / T::from_usize_lossy(self.uncertainty.len())
    }
}
