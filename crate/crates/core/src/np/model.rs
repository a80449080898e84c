use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::attention::{attention_aggregate, ClassCenters};
use super::bank::{MemoryBank, DEFAULT_BANK_CAPACITY};
use super::prediction::Prediction;
use crate::error::{Error, Result};
use crate::gaussian::{DiagGaussian, DiagGaussianVar, LogBase};
use crate::numerics::{
    positive_std, reparameterize, softmax_rows, Activation, Mlp, ParamStore, Tape, Tensor2, Var,
};
use crate::scalar::Scalar;

/// How the latent variable is shared across targets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatentMode {
    /// One latent per batch from mean aggregation.
    #[default]
    Global,
    /// One latent per target; context enters through attention over class centers.
    PerTarget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NpConfig {
    pub input_dim: usize,
    pub num_classes: usize,
    /// Widths of the feature extractor after the input; empty means raw inputs are the features.
    pub backbone: Vec<usize>,
    /// Hidden width ℳ; `None` means a quarter of the feature dimension.
    pub hidden: Option<usize>,
    /// Latent dimension; `None` means ℳ.
    pub latent_dim: Option<usize>,
    /// Number of latent samples T per target.
    pub samples: usize,
    pub bank_capacity: usize,
    pub mode: LatentMode,
}

impl Default for NpConfig {
    fn default() -> Self {
        Self {
            input_dim: 2,
            num_classes: 2,
            backbone: vec![64, 64],
            hidden: None,
            latent_dim: None,
            samples: 10,
            bank_capacity: DEFAULT_BANK_CAPACITY,
            mode: LatentMode::Global,
        }
    }
}

impl NpConfig {
    pub fn feature_dim(&self) -> usize {
        self.backbone.last().copied().unwrap_or(self.input_dim)
    }

    pub fn hidden_width(&self) -> usize {
        self.hidden.unwrap_or_else(|| (self.feature_dim() / 4).max(1))
    }

    pub fn latent_width(&self) -> usize {
        self.latent_dim.unwrap_or_else(|| self.hidden_width())
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::invalid("np.input_dim must be positive"));
        }
        if self.num_classes < 2 {
            return Err(Error::invalid("np.num_classes must be at least 2"));
        }
        if self.backbone.contains(&0) || self.hidden == Some(0) || self.latent_dim == Some(0) {
            return Err(Error::invalid("np layer widths must be positive"));
        }
        if self.samples == 0 {
            return Err(Error::invalid("np.samples (T) must be at least 1"));
        }
        if self.bank_capacity == 0 {
            return Err(Error::invalid("np.bank_capacity must be positive"));
        }
        Ok(())
    }
}

/// Aggregated context used in inference mode.
#[derive(Clone, Debug, PartialEq)]
pub enum InferenceContext<T> {
    /// `1 x ℳ` latent-encoder mean and `1 x ℳ` deterministic representation.
    Global { latent: Tensor2<T>, det: Tensor2<T> },
    PerTarget { latent: ClassCenters<T>, det: ClassCenters<T> },
}

/// Tape-level result of a training-mode forward pass.
#[derive(Clone, Debug)]
pub struct TrainForward<T> {
    /// `(T n) x C` class probabilities; row `t n + i` is sample `t` of target `i`.
    pub probs: Var,
    pub q_target: DiagGaussianVar,
    pub q_context: DiagGaussianVar,
    /// Detached latent encodings destined for the latent bank(s).
    pub latent_encodings: Tensor2<T>,
    /// Detached deterministic encodings of the context.
    pub det_encodings: Tensor2<T>,
    pub target_labels: Vec<usize>,
    pub context_labels: Vec<usize>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Banks<T> {
    Global { latent: MemoryBank<T>, det: MemoryBank<T> },
    PerTarget { latent: Vec<MemoryBank<T>>, det: Vec<MemoryBank<T>> },
}

/// Neural-process classifier with latent and deterministic paths.
#[derive(Clone, Debug, PartialEq)]
pub struct NpModel<T> {
    config: NpConfig,
    store: ParamStore<T>,
    backbone: Option<Mlp>,
    latent_encoder: Mlp,
    mean_head: Mlp,
    std_head: Mlp,
    det_encoder: Mlp,
    decoder: Mlp,
    classifier: Mlp,
    banks: Banks<T>,
    frozen: Option<InferenceContext<T>>,
}

impl<T: Scalar> NpModel<T> {
    pub fn new<R: Rng + ?Sized>(config: NpConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let mut store = ParamStore::new();
        let (f, c) = (config.feature_dim(), config.num_classes);
        let (m, dz) = (config.hidden_width(), config.latent_width());
        let backbone = if config.backbone.is_empty() {
            None
        } else {
            let mut sizes = vec![config.input_dim];
            sizes.extend(&config.backbone);
            Some(Mlp::new(&mut store, "backbone", &sizes, Activation::Relu, rng)?)
        };
        let latent_encoder = Mlp::new(&mut store, "latent_encoder", &[f + c, m, m], Activation::Identity, rng)?;
        let mean_head = Mlp::new(&mut store, "mean_head", &[m, m, dz], Activation::Identity, rng)?;
        let std_head = Mlp::new(&mut store, "std_head", &[m, m, dz], Activation::Identity, rng)?;
        let det_encoder = Mlp::new(&mut store, "det_encoder", &[f + c, m, m], Activation::Identity, rng)?;
        let decoder = Mlp::new(&mut store, "decoder", &[f + dz + m, m, m], Activation::Relu, rng)?;
        let classifier = Mlp::without_bias(&mut store, "classifier", &[m, c], Activation::Identity, rng)?;
        let banks = fresh_banks(&config)?;
        Ok(Self {
            config,
            store,
            backbone,
            latent_encoder,
            mean_head,
            std_head,
            det_encoder,
            decoder,
            classifier,
            banks,
            frozen: None,
        })
    }

    pub fn config(&self) -> &NpConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamStore<T> {
        &self.store
    }

    pub fn params_mut(&mut self) -> &mut ParamStore<T> {
        &mut self.store
    }

    /// Copy of the model with parameter values taken from `params`.
    pub fn with_params(&self, params: &ParamStore<T>) -> Result<Self> {
        let mut out = self.clone();
        out.store.copy_values_from(params)?;
        Ok(out)
    }

    pub fn num_classes(&self) -> usize {
        self.config.num_classes
    }

    pub fn samples(&self) -> usize {
        self.config.samples
    }

    pub fn set_samples(&mut self, t: usize) -> Result<()> {
        if t == 0 {
            return Err(Error::invalid("sample count T must be at least 1"));
        }
        self.config.samples = t;
        Ok(())
    }

    pub fn latent_dim(&self) -> usize {
        self.config.latent_width()
    }

    /// Number of vectors currently held across all latent banks.
    pub fn latent_bank_len(&self) -> usize {
        match &self.banks {
            Banks::Global { latent, .. } => latent.len(),
            Banks::PerTarget { latent, .. } => latent.iter().map(MemoryBank::len).sum(),
        }
    }

    pub fn det_bank_len(&self) -> usize {
        match &self.banks {
            Banks::Global { det, .. } => det.len(),
            Banks::PerTarget { det, .. } => det.iter().map(MemoryBank::len).sum(),
        }
    }

    /// Empties every bank and drops any finalized context.
    pub fn clear_banks(&mut self) {
        match &mut self.banks {
            Banks::Global { latent, det } => {
                latent.clear();
                det.clear();
            }
            Banks::PerTarget { latent, det } => {
                latent.iter_mut().chain(det.iter_mut()).for_each(MemoryBank::clear);
            }
        }
        self.frozen = None;
    }

    pub fn frozen_context(&self) -> Option<&InferenceContext<T>> {
        self.frozen.as_ref()
    }

    /// Installs a previously finalized context (e.g. from a checkpoint).
    pub fn set_frozen_context(&mut self, ctx: InferenceContext<T>) -> Result<()> {
        let (m, c) = (self.config.hidden_width(), self.config.num_classes);
        let ok = match (&ctx, self.config.mode) {
            (InferenceContext::Global { latent, det }, LatentMode::Global) => {
                latent.shape() == (1, m) && det.shape() == (1, m)
            }
            (InferenceContext::PerTarget { latent, det }, LatentMode::PerTarget) => {
                latent.centers().cols() == m
                    && det.centers().cols() == m
                    && latent.classes().iter().chain(det.classes()).all(|&k| k < c)
            }
            _ => false,
        };
        if !ok {
            return Err(Error::shape("set_frozen_context", "context does not match model layout"));
        }
        self.frozen = Some(ctx);
        Ok(())
    }

    /// Raw inputs to features.
    pub fn features(&self, tape: &mut Tape<T>, x: Var) -> Result<Var> {
        match &self.backbone {
            Some(b) => b.forward(tape, &self.store, x),
            None => Ok(x),
        }
    }

    fn check_inputs(&self, x: &Tensor2<T>, labels: Option<&[usize]>) -> Result<()> {
        if x.cols() != self.config.input_dim {
            return Err(Error::shape(
                "np_input",
                format!("expected {} input columns, got {}", self.config.input_dim, x.cols()),
            ));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("np_input"));
        }
        if let Some(y) = labels {
            if y.len() != x.rows() {
                return Err(Error::shape("np_input", "labels not aligned with features"));
            }
            if let Some(&bad) = y.iter().find(|&&k| k >= self.config.num_classes) {
                return Err(Error::invalid(format!("label {bad} out of range")));
            }
        }
        Ok(())
    }

    fn with_label(&self, tape: &mut Tape<T>, feats: Var, labels: &[usize]) -> Result<Var> {
        let oh = tape.constant(one_hot(labels, self.config.num_classes));
        tape.concat_cols(&[feats, oh])
    }

    fn with_uniform_label(&self, tape: &mut Tape<T>, feats: Var) -> Result<Var> {
        let n = tape.value(feats).rows();
        let c = self.config.num_classes;
        let u = tape.constant(Tensor2::full(n, c, T::one() / T::from_usize_lossy(c)));
        tape.concat_cols(&[feats, u])
    }

    fn heads(&self, tape: &mut Tape<T>, rep: Var) -> Result<DiagGaussianVar> {
        let mean = self.mean_head.forward(tape, &self.store, rep)?;
        let raw = self.std_head.forward(tape, &self.store, rep)?;
        let std = positive_std(tape, raw);
        Ok(DiagGaussianVar { mean, std })
    }

    fn encode_latent(&self, tape: &mut Tape<T>, feats: Var, labels: &[usize]) -> Result<Var> {
        let inp = self.with_label(tape, feats, labels)?;
        self.latent_encoder.forward(tape, &self.store, inp)
    }

    fn encode_det(&self, tape: &mut Tape<T>, feats: Var, labels: &[usize]) -> Result<Var> {
        let inp = self.with_label(tape, feats, labels)?;
        self.det_encoder.forward(tape, &self.store, inp)
    }

    /// Decodes every `(target, sample)` pair. `z` is `(T n) x Dz`; `r` is `1 x ℳ` or `n x ℳ`.
    fn decode(&self, tape: &mut Tape<T>, feats: Var, z: Var, r: Var, t: usize) -> Result<Var> {
        let rows = t * tape.value(feats).rows();
        let h = self.decoder.forward_concat(tape, &self.store, &[feats, z, r], rows)?;
        let logits = self.classifier.forward(tape, &self.store, h)?;
        softmax_rows(tape, logits)
    }

    /// Standard-normal noise for `rows` targets; `None` gives zeros.
    pub fn sample_noise<R: Rng + ?Sized>(&self, rows: usize, rng: Option<&mut R>) -> Tensor2<T> {
        let (t, dz) = (self.config.samples, self.config.latent_width());
        match rng {
            Some(rng) => Tensor2::from_fn(t * rows, dz, |_, _| {
                let e: f64 = StandardNormal.sample(rng);
                T::lit(e)
            }),
            None => Tensor2::zeros(t * rows, dz),
        }
    }

    /// Training-mode forward pass over targets, with context given as row indices into the targets.
    ///
    /// `noise` is `(T n) x Dz`.
    pub fn forward_train(
        &self,
        tape: &mut Tape<T>,
        x: &Tensor2<T>,
        labels: &[usize],
        context: &[usize],
        noise: &Tensor2<T>,
    ) -> Result<TrainForward<T>> {
        self.check_inputs(x, Some(labels))?;
        if x.rows() == 0 {
            return Err(Error::Empty("np training batch"));
        }
        if context.is_empty() {
            return Err(Error::Empty("np context set"));
        }
        if let Some(&bad) = context.iter().find(|&&i| i >= x.rows()) {
            return Err(Error::invalid(format!("context index {bad} out of range")));
        }
        let t = self.config.samples;
        if noise.shape() != (t * x.rows(), self.config.latent_width()) {
            return Err(Error::shape("forward_train", "noise must be (T n) x Dz"));
        }
        let xv = tape.constant(x.clone());
        let feats = self.features(tape, xv)?;
        let ctx_feats = tape.gather_rows(feats, context)?;
        let ctx_labels: Vec<usize> = context.iter().map(|&i| labels[i]).collect();

        let enc_t = self.encode_latent(tape, feats, labels)?;
        let enc_c = self.encode_latent(tape, ctx_feats, &ctx_labels)?;
        let det_c = self.encode_det(tape, ctx_feats, &ctx_labels)?;
        let (q_target, q_context, r, bank_latent) = match self.config.mode {
            LatentMode::Global => {
                let agg_t = tape.mean_rows(enc_t)?;
                let agg_c = tape.mean_rows(enc_c)?;
                let r = tape.mean_rows(det_c)?;
                let q_t = self.heads(tape, agg_t)?;
                let q_c = self.heads(tape, agg_c)?;
                (q_t, q_c, r, tape.value(enc_t).clone())
            }
            LatentMode::PerTarget => {
                let centers = class_centers_var(tape, enc_c, &ctx_labels, self.config.num_classes)?;
                let det_centers = class_centers_var(tape, det_c, &ctx_labels, self.config.num_classes)?;
                let q_t = self.heads(tape, enc_t)?;
                let lat_q_in = self.with_uniform_label(tape, feats)?;
                let lat_q = self.latent_encoder.forward(tape, &self.store, lat_q_in)?;
                let att = tape.attention(lat_q, centers)?;
                let q_c = self.heads(tape, att)?;
                let det_q_in = self.with_uniform_label(tape, feats)?;
                let det_q = self.det_encoder.forward(tape, &self.store, det_q_in)?;
                let r = tape.attention(det_q, det_centers)?;
                (q_t, q_c, r, tape.value(enc_c).clone())
            }
        };
        let z = reparameterize(tape, q_target.mean, q_target.std, noise)?;
        let probs = self.decode(tape, feats, z, r, t)?;
        Ok(TrainForward {
            probs,
            q_target,
            q_context,
            latent_encodings: bank_latent,
            det_encodings: tape.value(det_c).clone(),
            target_labels: labels.to_vec(),
            context_labels: ctx_labels,
            samples: t,
        })
    }

    /// Pushes the detached encodings of a training pass into the banks.
    pub fn record(&mut self, fwd: &TrainForward<T>) -> Result<()> {
        match &mut self.banks {
            Banks::Global { latent, det } => {
                latent.push(&fwd.latent_encodings)?;
                det.push(&fwd.det_encodings)?;
            }
            Banks::PerTarget { latent, det } => {
                for (i, &k) in fwd.context_labels.iter().enumerate() {
                    latent[k].push_one(fwd.latent_encodings.row(i).to_vec());
                    det[k].push_one(fwd.det_encodings.row(i).to_vec());
                }
            }
        }
        Ok(())
    }

    /// Mean-aggregated latent Gaussian of a labeled batch; encodings go to the latent bank.
    ///
    /// In per-target mode the encodings go to the per-class banks.
    pub fn latent_path(&mut self, x: &Tensor2<T>, labels: &[usize]) -> Result<DiagGaussian<T>> {
        self.check_inputs(x, Some(labels))?;
        if x.rows() == 0 {
            return Err(Error::Empty("latent_path batch"));
        }
        let mut tape = Tape::new();
        let xv = tape.constant(x.clone());
        let feats = self.features(&mut tape, xv)?;
        let enc = self.encode_latent(&mut tape, feats, labels)?;
        let agg = tape.mean_rows(enc)?;
        let q = self.heads(&mut tape, agg)?;
        let enc_val = tape.value(enc).clone();
        self.push_latent(&enc_val, labels)?;
        q.value_row(&tape, 0)
    }

    /// Mean-aggregated deterministic representation of a context batch; encodings go to the deterministic bank.
    pub fn deterministic_path(&mut self, x: &Tensor2<T>, labels: &[usize]) -> Result<Vec<T>> {
        self.check_inputs(x, Some(labels))?;
        if x.rows() == 0 {
            return Err(Error::Empty("deterministic_path batch"));
        }
        let mut tape = Tape::new();
        let xv = tape.constant(x.clone());
        let feats = self.features(&mut tape, xv)?;
        let enc = self.encode_det(&mut tape, feats, labels)?;
        let agg = tape.mean_rows(enc)?;
        let out = tape.value(agg).row(0).to_vec();
        let enc_val = tape.value(enc).clone();
        match &mut self.banks {
            Banks::Global { det, .. } => det.push(&enc_val)?,
            Banks::PerTarget { det, .. } => {
                for (i, &k) in labels.iter().enumerate() {
                    det[k].push_one(enc_val.row(i).to_vec());
                }
            }
        }
        Ok(out)
    }

    fn push_latent(&mut self, enc: &Tensor2<T>, labels: &[usize]) -> Result<()> {
        match &mut self.banks {
            Banks::Global { latent, .. } => latent.push(enc),
            Banks::PerTarget { latent, .. } => {
                for (i, &k) in labels.iter().enumerate() {
                    latent[k].push_one(enc.row(i).to_vec());
                }
                Ok(())
            }
        }
    }

    /// One latent Gaussian per row, without aggregation across the batch.
    pub fn per_target_latent(&self, x: &Tensor2<T>, labels: &[usize]) -> Result<Vec<DiagGaussian<T>>> {
        self.check_inputs(x, Some(labels))?;
        if x.rows() == 0 {
            return Err(Error::Empty("per_target_latent batch"));
        }
        let mut tape = Tape::new();
        let xv = tape.constant(x.clone());
        let feats = self.features(&mut tape, xv)?;
        let enc = self.encode_latent(&mut tape, feats, labels)?;
        let q = self.heads(&mut tape, enc)?;
        (0..x.rows()).map(|i| q.value_row(&tape, i)).collect()
    }

    /// Context for inference: the finalized one if present, otherwise the current bank means.
    pub fn inference_context(&self) -> Result<InferenceContext<T>> {
        if let Some(ctx) = &self.frozen {
            return Ok(ctx.clone());
        }
        match &self.banks {
            Banks::Global { latent, det } => {
                if latent.is_empty() || det.is_empty() {
                    return Err(Error::Empty("memory bank in inference mode"));
                }
                Ok(InferenceContext::Global {
                    latent: Tensor2::row_vector(&latent.finalize()?),
                    det: Tensor2::row_vector(&det.finalize()?),
                })
            }
            Banks::PerTarget { latent, det } => Ok(InferenceContext::PerTarget {
                latent: centers_from_banks(latent)?,
                det: centers_from_banks(det)?,
            }),
        }
    }

    /// Replaces the banks by their averaged representations.
    pub fn finalize(&mut self) -> Result<()> {
        let ctx = self.inference_context()?;
        self.clear_banks();
        self.frozen = Some(ctx);
        Ok(())
    }

    /// Inference-mode prediction with `T` latent samples per target.
    ///
    /// `rng = None` forces `ε = 0`.
    pub fn predict<R: Rng + ?Sized>(
        &self,
        x: &Tensor2<T>,
        base: LogBase,
        rng: Option<&mut R>,
    ) -> Result<Prediction<T>> {
        let ctx = self.inference_context()?;
        let noise = self.sample_noise(x.rows(), rng);
        self.predict_with(x, &ctx, &noise, base)
    }

    /// Inference-mode prediction with an explicit context and noise.
    pub fn predict_with(
        &self,
        x: &Tensor2<T>,
        ctx: &InferenceContext<T>,
        noise: &Tensor2<T>,
        base: LogBase,
    ) -> Result<Prediction<T>> {
        self.check_inputs(x, None)?;
        if x.rows() == 0 {
            return Prediction::from_samples(&Tensor2::zeros(0, self.config.num_classes), self.config.samples, base);
        }
        let mut tape = Tape::new();
        let probs = self.inference_probs(&mut tape, x, ctx, noise)?;
        Prediction::from_samples(tape.value(probs), self.config.samples, base)
    }

    fn inference_probs(
        &self,
        tape: &mut Tape<T>,
        x: &Tensor2<T>,
        ctx: &InferenceContext<T>,
        noise: &Tensor2<T>,
    ) -> Result<Var> {
        let t = self.config.samples;
        if noise.shape() != (t * x.rows(), self.config.latent_width()) {
            return Err(Error::shape("predict", "noise must be (T n) x Dz"));
        }
        let xv = tape.constant(x.clone());
        let feats = self.features(tape, xv)?;
        let (q, r) = match ctx {
            InferenceContext::Global { latent, det } => {
                let l = tape.constant(latent.clone());
                (self.heads(tape, l)?, tape.constant(det.clone()))
            }
            InferenceContext::PerTarget { latent, det } => {
                let lat_q_in = self.with_uniform_label(tape, feats)?;
                let lat_q = self.latent_encoder.forward(tape, &self.store, lat_q_in)?;
                let agg = attention_aggregate(tape.value(lat_q), latent)?;
                let agg = tape.constant(agg);
                let q = self.heads(tape, agg)?;
                let det_q_in = self.with_uniform_label(tape, feats)?;
                let det_q = self.det_encoder.forward(tape, &self.store, det_q_in)?;
                let r = attention_aggregate(tape.value(det_q), det)?;
                (q, tape.constant(r))
            }
        };
        let z = reparameterize(tape, q.mean, q.std, noise)?;
        self.decode(tape, feats, z, r, t)
    }

    /// Training-mode prediction: latent drawn from the target-conditioned Gaussian.
    pub fn predict_training<R: Rng + ?Sized>(
        &self,
        x: &Tensor2<T>,
        labels: &[usize],
        context: &[usize],
        base: LogBase,
        rng: Option<&mut R>,
    ) -> Result<Prediction<T>> {
        let noise = self.sample_noise(x.rows(), rng);
        let mut tape = Tape::new();
        let fwd = self.forward_train(&mut tape, x, labels, context, &noise)?;
        Prediction::from_samples(tape.value(fwd.probs), fwd.samples, base)
    }
}

fn fresh_banks<T: Scalar>(config: &NpConfig) -> Result<Banks<T>> {
    let (q, m) = (config.bank_capacity, config.hidden_width());
    Ok(match config.mode {
        LatentMode::Global => Banks::Global {
            latent: MemoryBank::zero_initialized(q, m)?,
            det: MemoryBank::zero_initialized(q, m)?,
        },
        LatentMode::PerTarget => Banks::PerTarget {
            latent: (0..config.num_classes).map(|_| MemoryBank::new(q, m)).collect::<Result<_>>()?,
            det: (0..config.num_classes).map(|_| MemoryBank::new(q, m)).collect::<Result<_>>()?,
        },
    })
}

fn centers_from_banks<T: Scalar>(banks: &[MemoryBank<T>]) -> Result<ClassCenters<T>> {
    let mut classes = Vec::new();
    let mut data = Vec::new();
    for (k, b) in banks.iter().enumerate() {
        if !b.is_empty() {
            classes.push(k);
            data.extend(b.finalize()?);
        }
    }
    if classes.is_empty() {
        return Err(Error::Empty("class banks in inference mode"));
    }
    let dim = banks[0].dim();
    ClassCenters::new(classes.clone(), Tensor2::new(classes.len(), dim, data)?)
}

fn class_centers_var<T: Scalar>(
    tape: &mut Tape<T>,
    enc: Var,
    labels: &[usize],
    num_classes: usize,
) -> Result<Var> {
    let mut parts = Vec::new();
    for k in 0..num_classes {
        let idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == k).collect();
        if idx.is_empty() {
            continue;
        }
        let g = tape.gather_rows(enc, &idx)?;
        parts.push(tape.mean_rows(g)?);
    }
    tape.concat_rows(&parts)
}

pub fn one_hot<T: Scalar>(labels: &[usize], num_classes: usize) -> Tensor2<T> {
    Tensor2::from_fn(labels.len(), num_classes, |i, k| {
        if labels[i] == k {
            T::one()
        } else {
            T::zero()
        }
    })
}
