use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Tensor2;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    #[default]
    TwoMoons,
    GaussianBlobs,
    ConcentricRings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub noise: f64,
    pub classes: usize,
    /// Columns beyond the first two carry pure noise.
    pub feature_dim: usize,
    pub seed: u64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            kind: GeneratorKind::TwoMoons,
            n: 1000,
            noise: 0.1,
            classes: 2,
            feature_dim: 2,
            seed: 0,
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::invalid("dataset.classes must be at least 2"));
        }
        if self.n < self.classes {
            return Err(Error::invalid("dataset.n must be at least dataset.classes"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::invalid("dataset.noise must be finite and >= 0"));
        }
        if self.feature_dim < 2 {
            return Err(Error::invalid("dataset.feature_dim must be at least 2"));
        }
        if self.kind == GeneratorKind::TwoMoons && self.classes != 2 {
            return Err(Error::invalid("two_moons has exactly 2 classes"));
        }
        Ok(())
    }
}

/// Features plus integer labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub x: Tensor2<T>,
    pub y: Vec<usize>,
    pub num_classes: usize,
}

impl<T: Scalar> Dataset<T> {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset<T> {
        Dataset {
            x: self.x.gather_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            num_classes: self.num_classes,
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.y, self.num_classes)
    }
}

pub fn class_counts(labels: &[usize], num_classes: usize) -> Vec<usize> {
    let mut c = vec![0; num_classes];
    for &y in labels {
        c[y] += 1;
    }
    c
}

/// Per-class sample counts summing to `n`; the remainder goes to the first classes.
fn equal_counts(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|c| n / k + usize::from(c < n % k)).collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// Deterministic in `spec` (including its seed).
pub fn generate<T: Scalar>(spec: &DatasetSpec) -> Result<Dataset<T>> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let counts = equal_counts(spec.n, spec.classes);
    let mut points: Vec<([f64; 2], usize)> = Vec::with_capacity(spec.n);
    match spec.kind {
        GeneratorKind::TwoMoons => {
            for th in linspace(0.0, std::f64::consts::PI, counts[0]) {
                points.push(([th.cos(), th.sin()], 0));
            }
            for th in linspace(0.0, std::f64::consts::PI, counts[1]) {
                points.push(([1.0 - th.cos(), 0.5 - th.sin()], 1));
            }
        }
        GeneratorKind::GaussianBlobs => {
            let centers: Vec<[f64; 2]> = (0..spec.classes)
                .map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
                .collect();
            for (k, &m) in counts.iter().enumerate() {
                points.extend(std::iter::repeat_n((centers[k], k), m));
            }
        }
        GeneratorKind::ConcentricRings => {
            for (k, &m) in counts.iter().enumerate() {
                let r = (k + 1) as f64;
                for _ in 0..m {
                    let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    points.push(([r * th.cos(), r * th.sin()], k));
                }
            }
        }
    }
    points.shuffle(&mut rng);
    let d = spec.feature_dim;
    let mut data = Vec::with_capacity(spec.n * d);
    let mut y = Vec::with_capacity(spec.n);
    let noise = Normal::new(0.0, spec.noise).map_err(|e| Error::invalid(e.to_string()))?;
    for (p, label) in points {
        for j in 0..d {
            let base = if j < 2 { p[j] } else { 0.0 };
            let e = if spec.noise > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            data.push(T::lit(base + e));
        }
        y.push(label);
    }
    Ok(Dataset {
        x: Tensor2::new(spec.n, d, data)?,
        y,
        num_classes: spec.classes,
    })
}

/// Standard-normal draw; exposed for callers building custom generators.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
