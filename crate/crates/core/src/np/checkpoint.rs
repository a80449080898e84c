use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::attention::ClassCenters;
use super::model::{InferenceContext, NpConfig, NpModel};
use crate::error::{Error, Result};
use crate::numerics::{ParamStore, Tensor2};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;
pub const MODEL_KIND_NP: &str = "np";

/// Row-major tensor stored as `f64`; exact for `f32` and `f64` models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl TensorRecord {
    pub fn from_tensor<T: Scalar>(t: &Tensor2<T>) -> Self {
        Self {
            rows: t.rows(),
            cols: t.cols(),
            data: t.data().iter().map(|v| v.to_f64_lossy()).collect(),
        }
    }

    pub fn to_tensor<T: Scalar>(&self) -> Result<Tensor2<T>> {
        Tensor2::new(self.rows, self.cols, self.data.iter().map(|&v| T::lit(v)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRecord {
    pub name: String,
    #[serde(flatten)]
    pub value: TensorRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ContextRecord {
    Global {
        latent: TensorRecord,
        det: TensorRecord,
    },
    PerTarget {
        latent_classes: Vec<usize>,
        latent: TensorRecord,
        det_classes: Vec<usize>,
        det: TensorRecord,
    },
}

/// Self-contained NP model snapshot: config, parameters and the frozen
/// inference context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format_version: u32,
    pub model_kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: NpConfig,
    pub params: Vec<ParamRecord>,
    pub context: ContextRecord,
}

/// Hex SHA-256 of the compact JSON encoding of `value`.
pub fn config_hash<S: Serialize>(value: &S) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

impl Checkpoint {
    /// Snapshot of `model`; its banks must be non-empty or a context frozen.
    pub fn from_model<T: Scalar>(model: &NpModel<T>, seed: u64, config_hash: String) -> Result<Self> {
        let store = model.params();
        let params = store
            .ids()
            .map(|id| ParamRecord {
                name: store.name(id).to_string(),
                value: TensorRecord::from_tensor(store.value(id)),
            })
            .collect();
        let context = match model.inference_context()? {
            InferenceContext::Global { latent, det } => ContextRecord::Global {
                latent: TensorRecord::from_tensor(&latent),
                det: TensorRecord::from_tensor(&det),
            },
            InferenceContext::PerTarget { latent, det } => ContextRecord::PerTarget {
                latent_classes: latent.classes().to_vec(),
                latent: TensorRecord::from_tensor(latent.centers()),
                det_classes: det.classes().to_vec(),
                det: TensorRecord::from_tensor(det.centers()),
            },
        };
        Ok(Self {
            format_version: CHECKPOINT_FORMAT_VERSION,
            model_kind: MODEL_KIND_NP.to_string(),
            config_hash,
            seed,
            config: model.config().clone(),
            params,
            context,
        })
    }

    /// Rebuilds the model with the stored parameters and frozen context.
    pub fn to_model<T: Scalar>(&self) -> Result<NpModel<T>> {
        if self.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {}", self.format_version)));
        }
        if self.model_kind != MODEL_KIND_NP {
            return Err(Error::Format(format!("unsupported model kind `{}`", self.model_kind)));
        }
        let mut store = ParamStore::new();
        for p in &self.params {
            store.add(p.name.clone(), p.value.to_tensor()?);
        }
        // Init values are overwritten below; any generator will do.
        let skeleton = NpModel::new(self.config.clone(), &mut rng_from_seed(0))?;
        let mut model = skeleton
            .with_params(&store)
            .map_err(|e| Error::Format(format!("checkpoint parameters do not match config: {e}")))?;
        let ctx = match &self.context {
            ContextRecord::Global { latent, det } => InferenceContext::Global {
                latent: latent.to_tensor()?,
                det: det.to_tensor()?,
            },
            ContextRecord::PerTarget {
                latent_classes,
                latent,
                det_classes,
                det,
            } => InferenceContext::PerTarget {
                latent: ClassCenters::new(latent_classes.clone(), latent.to_tensor()?)?,
                det: ClassCenters::new(det_classes.clone(), det.to_tensor()?)?,
            },
        };
        model.set_frozen_context(ctx)?;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::np::LatentMode;
    use crate::gaussian::LogBase;

    fn trained(mode: LatentMode) -> NpModel<f64> {
        let cfg = NpConfig {
            input_dim: 2,
            num_classes: 3,
            backbone: vec![8],
            mode,
            ..Default::default()
        };
        let mut rng = rng_from_seed(3);
        let mut m = NpModel::new(cfg, &mut rng).unwrap();
        let x = Tensor2::from_fn(6, 2, |i, j| (i * 2 + j) as f64 * 0.1 - 0.4);
        let y = [0, 1, 2, 0, 1, 2];
        m.latent_path(&x, &y).unwrap();
        m.deterministic_path(&x, &y).unwrap();
        m.finalize().unwrap();
        m
    }

    #[test]
    fn byte_stable_roundtrip() {
        for mode in [LatentMode::Global, LatentMode::PerTarget] {
            let m = trained(mode);
            let ck = Checkpoint::from_model(&m, 11, config_hash(m.config()).unwrap()).unwrap();
            let text = ck.to_json().unwrap();
            let back = Checkpoint::from_json(&text).unwrap();
            assert_eq!(back, ck);
            assert_eq!(back.to_json().unwrap(), text);
            let restored: NpModel<f64> = back.to_model().unwrap();
            assert_eq!(restored.params(), m.params());
            let x = Tensor2::from_fn(4, 2, |i, j| (i + j) as f64 * 0.3);
            let a = m.predict::<crate::rng::Rng>(&x, LogBase::Two, None).unwrap();
            let b = restored.predict::<crate::rng::Rng>(&x, LogBase::Two, None).unwrap();
            assert_eq!(a.mean_probs(), b.mean_probs());
        }
    }

    #[test]
    fn hash_changes_with_config() {
        let a = NpConfig::default();
        let b = NpConfig { samples: 3, ..Default::default() };
        assert_eq!(config_hash(&a).unwrap().len(), 64);
        assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    }

    #[test]
    fn mismatched_params_rejected() {
        let m = trained(LatentMode::Global);
        let mut ck = Checkpoint::from_model(&m, 0, String::new()).unwrap();
        ck.params.pop();
        assert!(ck.to_model::<f64>().is_err());
        let mut ck = Checkpoint::from_model(&m, 0, String::new()).unwrap();
        ck.format_version = 99;
        assert!(ck.to_model::<f64>().is_err());
    }
}
