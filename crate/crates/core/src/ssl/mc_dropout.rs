use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::LogBase;
use crate::np::Prediction;
use crate::numerics::{cosine_lr, cross_entropy, softmax_rows, Activation, Mlp, ParamStore, Sgd, Tape, Tensor2};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McDropoutConfig {
    pub input_dim: usize,
    pub num_classes: usize,
    /// Hidden widths; dropout follows each of them.
    pub hidden: Vec<usize>,
    pub dropout: f64,
    pub samples: usize,
}

impl Default for McDropoutConfig {
    fn default() -> Self {
        Self {
            input_dim: 2,
            num_classes: 2,
            hidden: vec![64, 64],
            dropout: 0.1,
            samples: 10,
        }
    }
}

/// MLP classifier whose dropout stays active at prediction time.
#[derive(Clone, Debug, PartialEq)]
pub struct McDropoutModel<T> {
    config: McDropoutConfig,
    store: ParamStore<T>,
    net: Mlp,
}

/// Settings for plain supervised fitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupervisedFit {
    pub iterations: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
}

impl<T: Scalar> McDropoutModel<T> {
    pub fn new<R: Rng + ?Sized>(config: McDropoutConfig, rng: &mut R) -> Result<Self> {
        if !(0.0..1.0).contains(&config.dropout) {
            return Err(Error::invalid(format!("dropout rate {} not in [0,1)", config.dropout)));
        }
        if config.samples == 0 {
            return Err(Error::invalid("mc dropout samples (T) must be at least 1"));
        }
        let mut sizes = vec![config.input_dim];
        sizes.extend(&config.hidden);
        sizes.push(config.num_classes);
        let mut store = ParamStore::new();
        let net = Mlp::new(&mut store, "mc", &sizes, Activation::Identity, rng)?;
        Ok(Self { config, store, net })
    }

    pub fn config(&self) -> &McDropoutConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamStore<T> {
        &self.store
    }

    pub fn params_mut(&mut self) -> &mut ParamStore<T> {
        &mut self.store
    }

    pub fn set_samples(&mut self, t: usize) -> Result<()> {
        if t == 0 {
            return Err(Error::invalid("sample count T must be at least 1"));
        }
        self.config.samples = t;
        Ok(())
    }

    /// `T` stochastic passes with independent dropout masks.
    pub fn predict<R: Rng + ?Sized>(&self, x: &Tensor2<T>, base: LogBase, rng: &mut R) -> Result<Prediction<T>> {
        mc_dropout_predict(self, x, self.config.samples, base, rng)
    }

    /// Minibatch SGD on cross-entropy with dropout active.
    pub fn fit_supervised<R: Rng + ?Sized>(
        &mut self,
        x: &Tensor2<T>,
        y: &[usize],
        fit: &SupervisedFit,
        rng: &mut R,
    ) -> Result<Vec<T>> {
        if x.rows() == 0 || x.rows() != y.len() {
            return Err(Error::invalid("fit_supervised needs aligned nonempty data"));
        }
        let mut opt = Sgd::new(T::lit(fit.lr), T::lit(fit.momentum), T::lit(fit.weight_decay));
        let mut trace = Vec::with_capacity(fit.iterations);
        for it in 0..fit.iterations {
            let idx: Vec<usize> = (0..fit.batch_size).map(|_| rng.random_range(0..x.rows())).collect();
            let labels: Vec<usize> = idx.iter().map(|&i| y[i]).collect();
            let mut tape = Tape::new();
            let xb = tape.constant(x.gather_rows(&idx));
            let logits = self.net.forward_dropout(&mut tape, &self.store, xb, self.config.dropout, rng)?;
            let probs = softmax_rows(&mut tape, logits)?;
            let loss = cross_entropy(&mut tape, probs, &labels)?;
            tape.backward(loss, &mut self.store)?;
            opt.lr = T::lit(cosine_lr(fit.lr, it, fit.iterations));
            opt.step(&mut self.store);
            self.store.zero_grad();
            trace.push(tape.value(loss).item()?);
        }
        Ok(trace)
    }
}

pub fn mc_dropout_predict<T: Scalar, R: Rng + ?Sized>(
    model: &McDropoutModel<T>,
    x: &Tensor2<T>,
    t: usize,
    base: LogBase,
    rng: &mut R,
) -> Result<Prediction<T>> {
    if t == 0 {
        return Err(Error::invalid("sample count T must be at least 1"));
    }
    if x.cols() != model.config.input_dim {
        return Err(Error::shape("mc_dropout_predict", "input width mismatch"));
    }
    let mut tape = Tape::new();
    let xv = tape.constant(x.clone());
    let tiled = tape.tile_rows(xv, t);
    let logits = model.net.forward_dropout(&mut tape, &model.store, tiled, model.config.dropout, rng)?;
    let probs = softmax_rows(&mut tape, logits)?;
    Prediction::from_samples(tape.value(probs), t, base)
}
