use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Uniform};

use super::params::{ParamId, ParamStore};
use super::tape::{Tape, Var};
use super::tensor::Tensor2;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

#[derive(Clone, Debug, PartialEq)]
struct Layer {
    weight: ParamId,
    bias: Option<ParamId>,
    activation: Activation,
}

/// Fully connected network; ReLU on hidden layers.
///
/// Parameters live in a [`ParamStore`] so that several networks can share a
/// single optimizer and EMA shadow.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    layers: Vec<Layer>,
}

impl Mlp {
    /// Builds an MLP with `sizes = [input, hidden.., output]`.
    ///
    /// Weights and biases are drawn from `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`.
    pub fn new<T: Scalar, R: Rng + ?Sized>(
        store: &mut ParamStore<T>,
        name: &str,
        sizes: &[usize],
        output_activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        Self::build(store, name, sizes, output_activation, true, rng)
    }

    /// Same as [`Mlp::new`] but the layers carry no bias term.
    pub fn without_bias<T: Scalar, R: Rng + ?Sized>(
        store: &mut ParamStore<T>,
        name: &str,
        sizes: &[usize],
        output_activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        Self::build(store, name, sizes, output_activation, false, rng)
    }

    fn build<T: Scalar, R: Rng + ?Sized>(
        store: &mut ParamStore<T>,
        name: &str,
        sizes: &[usize],
        output_activation: Activation,
        bias: bool,
        rng: &mut R,
    ) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::invalid(format!(
                "mlp `{name}` needs at least two nonzero layer sizes, got {sizes:?}"
            )));
        }
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for (k, w) in sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
            let weight = Tensor2::from_fn(fan_in, fan_out, |_, _| T::lit(dist.sample(rng)));
            let weight = store.add(format!("{name}.{k}.weight"), weight);
            let bias = bias.then(|| {
                let b = Tensor2::from_fn(1, fan_out, |_, _| T::lit(dist.sample(rng)));
                store.add(format!("{name}.{k}.bias"), b)
            });
            let activation = if k + 2 == sizes.len() {
                output_activation
            } else {
                Activation::Relu
            };
            layers.push(Layer {
                weight,
                bias,
                activation,
            });
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            layers,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("nonempty sizes")
    }

    pub fn param_ids(&self) -> Vec<ParamId> {
        self.layers
            .iter()
            .flat_map(|l| std::iter::once(l.weight).chain(l.bias))
            .collect()
    }

    pub fn forward<T: Scalar>(
        &self,
        tape: &mut Tape<T>,
        store: &ParamStore<T>,
        x: Var,
    ) -> Result<Var> {
        self.forward_impl::<T, rand::rngs::ThreadRng>(tape, store, x, None)
    }

    /// Forward pass with inverted dropout applied after every hidden layer.
    pub fn forward_dropout<T: Scalar, R: Rng + ?Sized>(
        &self,
        tape: &mut Tape<T>,
        store: &ParamStore<T>,
        x: Var,
        rate: f64,
        rng: &mut R,
    ) -> Result<Var> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::invalid(format!("dropout rate {rate} not in [0,1)")));
        }
        self.forward_impl(tape, store, x, Some((rate, rng)))
    }

    fn forward_impl<T: Scalar, R: Rng + ?Sized>(
        &self,
        tape: &mut Tape<T>,
        store: &ParamStore<T>,
        x: Var,
        mut dropout: Option<(f64, &mut R)>,
    ) -> Result<Var> {
        let in_cols = tape.value(x).cols();
        if in_cols != self.input_dim() {
            return Err(Error::shape(
                "mlp forward",
                format!("input has {in_cols} features, expected {}", self.input_dim()),
            ));
        }
        let mut h = x;
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let w = tape.param(store, layer.weight);
            h = tape.matmul(h, w)?;
            h = Self::bias_activation(tape, store, layer, h)?;
            if k < last {
                if let Some((rate, rng)) = dropout.as_mut() {
                    if *rate > 0.0 {
                        let (r, c) = tape.value(h).shape();
                        let mask = dropout_mask::<T, R>(r, c, *rate, rng);
                        let m = tape.constant(mask);
                        h = tape.mul(h, m)?;
                    }
                }
            }
        }
        Ok(h)
    }

    fn bias_activation<T: Scalar>(tape: &mut Tape<T>, store: &ParamStore<T>, layer: &Layer, h: Var) -> Result<Var> {
        let mut h = h;
        if let Some(b) = layer.bias {
            let b = tape.param(store, b);
            h = tape.add_row(h, b)?;
        }
        if layer.activation == Activation::Relu {
            h = tape.relu(h);
        }
        Ok(h)
    }

    /// Same result as `forward` on the column concatenation of `parts`, where a
    /// part with fewer than `rows` rows is tiled (see [`Tape::tile_rows`]) up to
    /// `rows`. The first layer is applied before tiling, so broadcast parts
    /// cost one product each instead of `rows / part_rows`.
    pub fn forward_concat<T: Scalar>(
        &self,
        tape: &mut Tape<T>,
        store: &ParamStore<T>,
        parts: &[Var],
        rows: usize,
    ) -> Result<Var> {
        let width: usize = parts.iter().map(|&p| tape.value(p).cols()).sum();
        if width != self.input_dim() {
            return Err(Error::shape(
                "mlp forward_concat",
                format!("parts have {width} features, expected {}", self.input_dim()),
            ));
        }
        let first = &self.layers[0];
        let w = tape.param(store, first.weight);
        let mut acc: Option<Var> = None;
        let mut lo = 0;
        for &p in parts {
            let (pr, pc) = tape.value(p).shape();
            if pr == 0 || !rows.is_multiple_of(pr) {
                return Err(Error::shape(
                    "mlp forward_concat",
                    format!("part with {pr} rows does not tile to {rows}"),
                ));
            }
            let idx: Vec<usize> = (lo..lo + pc).collect();
            lo += pc;
            let block = tape.gather_rows(w, &idx)?;
            let mut y = tape.matmul(p, block)?;
            if pr < rows {
                y = tape.tile_rows(y, rows / pr);
            }
            acc = Some(match acc {
                None => y,
                Some(a) => tape.add(a, y)?,
            });
        }
        let mut h = acc.ok_or(Error::Empty("mlp forward_concat"))?;
        h = Self::bias_activation(tape, store, first, h)?;
        for layer in &self.layers[1..] {
            let w = tape.param(store, layer.weight);
            h = tape.matmul(h, w)?;
            h = Self::bias_activation(tape, store, layer, h)?;
        }
        Ok(h)
    }
}

fn dropout_mask<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rate: f64, rng: &mut R) -> Tensor2<T> {
    let keep = Bernoulli::new(1.0 - rate).expect("valid keep probability");
    let scale = T::lit(1.0 / (1.0 - rate));
    Tensor2::from_fn(rows, cols, |_, _| if keep.sample(rng) { scale } else { T::zero() })
}
