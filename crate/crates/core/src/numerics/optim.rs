use super::params::ParamStore;
use super::tensor::Tensor2;
use crate::scalar::Scalar;

/// SGD with heavy-ball momentum and optional L2 weight decay.
#[derive(Clone, Debug)]
pub struct Sgd<T> {
    pub lr: T,
    pub momentum: T,
    pub weight_decay: T,
    velocity: Vec<Tensor2<T>>,
}

impl<T: Scalar> Sgd<T> {
    pub fn new(lr: T, momentum: T, weight_decay: T) -> Self {
        Self {
            lr,
            momentum,
            weight_decay,
            velocity: Vec::new(),
        }
    }

    /// `v <- m v + (g + wd θ)`, `θ <- θ - lr v`.
    pub fn step(&mut self, store: &mut ParamStore<T>) {
        if self.velocity.is_empty() {
            self.velocity = store
                .values()
                .iter()
                .map(|v| Tensor2::zeros(v.rows(), v.cols()))
                .collect();
        }
        for ((value, grad), vel) in store.values_and_grads_mut().zip(self.velocity.iter_mut()) {
            for ((p, &g), v) in value
                .data_mut()
                .iter_mut()
                .zip(grad.data())
                .zip(vel.data_mut())
            {
                let d = g + self.weight_decay * *p;
                *v = self.momentum * *v + d;
                *p = *p - self.lr * *v;
            }
        }
    }
}

/// Half-cosine learning-rate schedule.
pub fn cosine_lr(base: f64, step: usize, total: usize) -> f64 {
    if total == 0 {
        return base;
    }
    let frac = step.min(total) as f64 / total as f64;
    base * 0.5 * (1.0 + (std::f64::consts::PI * frac).cos())
}
