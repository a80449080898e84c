use std::time::Instant;

use rand::Rng;

use super::augment::{strong_augment_rows, weak_augment_rows};
use super::config::SslConfig;
use super::ema::EmaShadow;
use super::loss::loss_total_var;
use super::pseudo::select_pseudo_labels;
use super::record::RunRecord;
use crate::datasets::{Dataset, SslSplit};
use crate::error::{Error, Result};
use crate::gaussian::alpha_u;
use crate::np::{NpConfig, NpModel, Prediction};
use crate::numerics::{cosine_lr, Sgd, Tape, Tensor2};
use crate::rng::SeedStreams;
use crate::scalar::Scalar;

/// Labeled feature rows.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledPool<T> {
    pub x: Tensor2<T>,
    pub y: Vec<usize>,
}

impl<T: Scalar> LabeledPool<T> {
    pub fn new(x: Tensor2<T>, y: Vec<usize>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::shape("LabeledPool", "features and labels differ in length"));
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnlabeledPool<T> {
    pub x: Tensor2<T>,
}

impl<T: Scalar> UnlabeledPool<T> {
    pub fn len(&self) -> usize {
        self.x.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.rows() == 0
    }
}

/// Immutable inputs of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct SslData<T> {
    pub labeled: LabeledPool<T>,
    pub unlabeled: UnlabeledPool<T>,
    pub test: LabeledPool<T>,
    pub num_classes: usize,
}

impl<T: Scalar> SslData<T> {
    /// Gathers the three pools of `split` from `data`.
    pub fn from_split(data: &Dataset<T>, split: &SslSplit) -> Result<Self> {
        let lab = data.subset(&split.labeled);
        let test = data.subset(&split.test);
        let out = Self {
            labeled: LabeledPool::new(lab.x, lab.y)?,
            unlabeled: UnlabeledPool {
                x: data.x.gather_rows(&split.unlabeled),
            },
            test: LabeledPool::new(test.x, test.y)?,
            num_classes: data.num_classes,
        };
        out.validate(data.x.cols())?;
        Ok(out)
    }

    pub fn validate(&self, input_dim: usize) -> Result<()> {
        if self.labeled.is_empty() {
            return Err(Error::Empty("labeled pool"));
        }
        for (what, x) in [("labeled", &self.labeled.x), ("unlabeled", &self.unlabeled.x), ("test", &self.test.x)] {
            if x.rows() > 0 && x.cols() != input_dim {
                return Err(Error::shape("SslData", format!("{what} pool has {} columns, model expects {input_dim}", x.cols())));
            }
        }
        let mut seen = vec![false; self.num_classes];
        for &y in self.labeled.y.iter().chain(&self.test.y) {
            if y >= self.num_classes {
                return Err(Error::invalid(format!("label {y} out of range")));
            }
        }
        for &y in &self.labeled.y {
            seen[y] = true;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("class {k} has no labeled sample")));
        }
        Ok(())
    }
}

/// Result of a training run: the EMA model with finalized banks and the logged metrics.
#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub model: NpModel<T>,
    pub records: Vec<RunRecord>,
    /// Final EMA-model prediction on the test pool (`None` when it is empty).
    pub test_prediction: Option<Prediction<T>>,
}

/// Stream name for evaluation noise at a given step (`"final"` after training).
pub fn eval_stream(step: &str) -> String {
    format!("eval/{step}")
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

fn mean_f64<T: Scalar>(v: &[T]) -> T {
    if v.is_empty() {
        T::zero()
    } else {
        v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len())
    }
}

/// Builds the model from the `init` stream of `cfg.seed` and trains it.
pub fn train_np<T: Scalar>(
    np: &NpConfig,
    data: &SslData<T>,
    cfg: &SslConfig,
    on_record: impl FnMut(&RunRecord),
) -> Result<TrainOutcome<T>> {
    let mut init = SeedStreams::new(cfg.seed).stream(SeedStreams::INIT);
    let model = NpModel::new(np.clone(), &mut init)?;
    train_np_model(model, data, cfg, on_record)
}

/// Trains an existing model; every random draw comes from named streams of `cfg.seed`.
pub fn train_np_model<T: Scalar>(
    mut model: NpModel<T>,
    data: &SslData<T>,
    cfg: &SslConfig,
    mut on_record: impl FnMut(&RunRecord),
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    data.validate(model.config().input_dim)?;
    if data.num_classes != model.num_classes() {
        return Err(Error::invalid("dataset and model disagree on the class count"));
    }
    model.set_samples(cfg.samples)?;
    let streams = SeedStreams::new(cfg.seed);
    let mut data_rng = streams.stream(SeedStreams::DATA);
    let mut aug_rng = streams.stream(SeedStreams::AUGMENT);
    let mut latent_rng = streams.stream(SeedStreams::LATENT);
    let mut opt = Sgd::new(T::lit(cfg.lr), T::lit(cfg.sgd_momentum), T::lit(cfg.weight_decay));
    let mut ema = EmaShadow::new(model.params(), T::lit(cfg.ema_momentum))?;
    let use_unlabeled = cfg.uses_unlabeled() && !data.unlabeled.is_empty();
    let (b, t, base) = (cfg.batch_size, cfg.samples, cfg.entropy_base);
    let context: Vec<usize> = (0..b).collect();
    let mut records = Vec::new();

    for it in 0..cfg.iterations {
        let started = cfg.log_wall_time.then(Instant::now);
        let li: Vec<usize> = (0..b).map(|_| data_rng.random_range(0..data.labeled.len())).collect();
        let yl: Vec<usize> = li.iter().map(|&i| data.labeled.y[i]).collect();
        let xl = weak_augment_rows(&data.labeled.x.gather_rows(&li), &cfg.augment, &mut aug_rng);

        let mut x_t = xl;
        let mut y_t = yl.clone();
        let mut selected = (Vec::new(), Vec::new());
        if use_unlabeled {
            let ui: Vec<usize> = (0..cfg.mu * b)
                .map(|_| data_rng.random_range(0..data.unlabeled.len()))
                .collect();
            let xu = data.unlabeled.x.gather_rows(&ui);
            let xu_w = weak_augment_rows(&xu, &cfg.augment, &mut aug_rng);
            let xu_s = strong_augment_rows(&xu, &cfg.augment, &mut aug_rng);
            match model.predict(&xu_w, base, Some(&mut latent_rng)) {
                Ok(pred) => {
                    let sel = select_pseudo_labels(&pred, cfg.tau_c, cfg.tau_u);
                    selected = (sel.indices.iter().map(|&i| i + b).collect(), sel.labels);
                    y_t.extend(pred.predicted_labels());
                    x_t = Tensor2::concat_rows(&[&x_t, &xu_s])?;
                }
                // No context yet (per-target banks start empty): labeled targets only.
                Err(Error::Empty(_)) => {}
                Err(e) => return Err(e),
            }
        }

        let noise = model.sample_noise(x_t.rows(), Some(&mut latent_rng));
        let mut tape = Tape::new();
        let fwd = model.forward_train(&mut tape, &x_t, &y_t, &context, &noise)?;
        let pred = Prediction::from_samples(tape.value(fwd.probs), t, base)?;
        let u_c = mean_f64(&pred.uncertainty()[..b]);
        let u_t = mean_f64(pred.uncertainty());
        let alpha = alpha_u(u_c, u_t)?;
        let lv = loss_total_var(
            &mut tape,
            fwd.probs,
            t,
            (&context, &yl),
            (&selected.0, &selected.1),
            fwd.q_context,
            fwd.q_target,
            alpha,
            cfg,
        )?;
        let total = tape.value(lv.total).item()?;
        if !total.is_finite() {
            return Err(Error::NonFinite("training loss"));
        }
        tape.backward(lv.total, model.params_mut())?;
        if cfg.cosine_schedule {
            opt.lr = T::lit(cosine_lr(cfg.lr, it, cfg.iterations));
        }
        opt.step(model.params_mut());
        model.params_mut().zero_grad();
        model.record(&fwd)?;
        ema.update(model.params())?;

        if (it + 1) % cfg.log_every == 0 || it + 1 == cfg.iterations {
            let train_pred = pred.predicted_labels();
            let train_acc = accuracy(&train_pred[..b], &yl);
            let eval = model.with_params(ema.params())?;
            let (test_acc, mean_u) = if data.test.is_empty() {
                (0.0, 0.0)
            } else {
                let mut rng = streams.stream(&eval_stream(&it.to_string()));
                let p = eval.predict(&data.test.x, base, Some(&mut rng))?;
                (accuracy(&p.predicted_labels(), &data.test.y), p.mean_uncertainty().to_f64_lossy())
            };
            let rec = RunRecord {
                iter: it + 1,
                l_cls: tape.value(lv.cls).item()?.to_f64_lossy(),
                l_u: match lv.unlabeled {
                    Some(u) => tape.value(u).item()?.to_f64_lossy(),
                    None => 0.0,
                },
                divergence: tape.value(lv.divergence).item()?.to_f64_lossy(),
                alpha_u: alpha.to_f64_lossy(),
                n_selected: selected.0.len(),
                train_acc,
                test_acc,
                mean_uncertainty: mean_u,
                wall_ms: started.map(|s| s.elapsed().as_secs_f64() * 1e3),
            };
            on_record(&rec);
            records.push(rec);
        }
    }

    let mut final_model = model.with_params(ema.params())?;
    final_model.finalize()?;
    let test_prediction = if data.test.is_empty() {
        None
    } else {
        let mut rng = streams.stream(&eval_stream("final"));
        Some(final_model.predict(&data.test.x, base, Some(&mut rng))?)
    };
    Ok(TrainOutcome {
        model: final_model,
        records,
        test_prediction,
    })
}
