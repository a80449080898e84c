//! Experiment configuration: one JSON document, optionally patched with
//! `--set key.path=value` overrides.

use std::path::{Path, PathBuf};

use npssl::datasets::{GeneratorKind, LabelBudget};
use npssl::np::{LatentMode, NpConfig, DEFAULT_BANK_CAPACITY};
use npssl::ssl::SslConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Complete description of an experiment. `seed` and `data` are required;
/// every other section falls back to its defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every random stream of the run is derived from it.
    pub seed: u64,
    pub data: DataConfig,
    #[serde(default)]
    pub model: ModelConfig,
    /// `ssl.seed` is ignored in favour of the master seed.
    #[serde(default)]
    pub ssl: SslConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub bench: BenchConfig,
    #[serde(default)]
    pub ablation: AblationConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs/default")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub kind: GeneratorKind,
    pub n: usize,
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default = "default_classes")]
    pub classes: usize,
    #[serde(default = "default_feature_dim")]
    pub feature_dim: usize,
    /// Read this CSV (with its `.spec.json` sidecar) instead of generating.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// `null` labels every training sample.
    #[serde(default = "default_labels_per_class")]
    pub labels_per_class: Option<usize>,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    /// Exponential class imbalance applied before splitting.
    #[serde(default)]
    pub imbalance: Option<ImbalanceConfig>,
}

fn default_noise() -> f64 {
    0.1
}
fn default_classes() -> usize {
    2
}
fn default_feature_dim() -> usize {
    2
}
fn default_labels_per_class() -> Option<usize> {
    Some(5)
}
fn default_test_fraction() -> f64 {
    0.2
}

impl DataConfig {
    pub fn budget(&self) -> LabelBudget {
        match self.labels_per_class {
            Some(n) => LabelBudget::PerClass(n),
            None => LabelBudget::All,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImbalanceConfig {
    /// Size of the head class.
    pub n1: usize,
    /// Head-to-tail ratio.
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub backbone: Vec<usize>,
    pub hidden: Option<usize>,
    pub latent_dim: Option<usize>,
    pub bank_capacity: usize,
    pub mode: LatentMode,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            backbone: vec![64, 64],
            hidden: None,
            latent_dim: None,
            bank_capacity: DEFAULT_BANK_CAPACITY,
            mode: LatentMode::Global,
        }
    }
}

impl ModelConfig {
    pub fn np_config(&self, input_dim: usize, num_classes: usize, samples: usize) -> NpConfig {
        NpConfig {
            input_dim,
            num_classes,
            backbone: self.backbone.clone(),
            hidden: self.hidden,
            latent_dim: self.latent_dim,
            samples,
            bank_capacity: self.bank_capacity,
            mode: self.mode,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub uce_bins: usize,
    /// Uncertainty below this marks a group as certain.
    pub pavpu_threshold: f64,
    /// Consecutive test samples per PAvPU group.
    pub pavpu_group: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            uce_bins: 10,
            pavpu_threshold: 0.5,
            pavpu_group: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub ts: Vec<usize>,
    pub repeats: usize,
    /// Rows per timed prediction call.
    pub batch: usize,
    /// Hidden widths shared by the NP backbone and the MC-dropout network.
    pub widths: Vec<usize>,
    pub dropout: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            ts: vec![1, 2, 5, 10, 20],
            repeats: 5,
            batch: 256,
            widths: vec![512; 4],
            dropout: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AblationConfig {
    /// Runs use seeds `seed, seed + 1, ..`.
    pub seeds: usize,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self { seeds: 5 }
    }
}

impl ExperimentConfig {
    /// Minimal valid config for `kind` with `n` points.
    pub fn new(seed: u64, kind: GeneratorKind, n: usize) -> Self {
        let v = serde_json::json!({ "seed": seed, "data": { "kind": kind, "n": n } });
        serde_json::from_value(v).expect("minimal config deserializes")
    }

    pub fn from_json(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut v: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("parse: {e}")))?;
        for o in overrides {
            apply_override(&mut v, o)?;
        }
        let cfg: Self = serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, overrides)
    }

    /// SSL settings with the master seed installed.
    pub fn ssl_config(&self) -> SslConfig {
        SslConfig {
            seed: self.seed,
            ..self.ssl.clone()
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        let d = &self.data;
        if d.path.is_none() {
            let spec = npssl::datasets::DatasetSpec {
                kind: d.kind,
                n: d.n,
                noise: d.noise,
                classes: d.classes,
                feature_dim: d.feature_dim,
                seed: 0,
            };
            spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        if !(0.0..1.0).contains(&d.test_fraction) {
            return bad("data.test_fraction must lie in [0, 1)".into());
        }
        if d.labels_per_class == Some(0) {
            return bad("data.labels_per_class must be positive or null".into());
        }
        if let Some(im) = d.imbalance {
            if im.n1 == 0 || !(im.gamma >= 1.0 && im.gamma.is_finite()) {
                return bad("data.imbalance needs n1 >= 1 and a finite gamma >= 1".into());
            }
        }
        self.ssl_config().validate().map_err(|e| CliError::Config(format!("ssl: {e}")))?;
        self.model
            .np_config(d.feature_dim, d.classes, self.ssl.samples)
            .validate()
            .map_err(|e| CliError::Config(format!("model: {e}")))?;
        if self.metrics.uce_bins == 0 || self.metrics.pavpu_group == 0 {
            return bad("metrics.uce_bins and metrics.pavpu_group must be positive".into());
        }
        if self.bench.repeats < 3 {
            return bad("bench.repeats must be at least 3".into());
        }
        if self.bench.ts.is_empty() || self.bench.ts.contains(&0) || self.bench.batch == 0 {
            return bad("bench.ts must be non-empty positive sample counts, bench.batch positive".into());
        }
        if self.bench.widths.is_empty() || self.bench.widths.contains(&0) {
            return bad("bench.widths must be non-empty and positive".into());
        }
        if self.ablation.seeds == 0 {
            return bad("ablation.seeds must be at least 1".into());
        }
        Ok(())
    }

    /// Canonical JSON as written to manifests.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Identity of the experiment; `output_dir` is excluded so relocated
    /// runs of the same config share a hash.
    pub fn hash(&self) -> CliResult<String> {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        npssl::np::config_hash(&c).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Applies `a.b.c=value`. The value is parsed as JSON when possible and
/// taken as a string otherwise; the key path must already exist.
pub fn apply_override(root: &mut Value, assignment: &str) -> CliResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
    let mut node = &mut *root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("override `{key}`: `{}` is not a section", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Err(CliError::Config(format!("override `{assignment}` has an empty key")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"seed": 3, "data": {"kind": "two_moons", "n": 200}}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_json(MINIMAL, &[]).unwrap();
        assert_eq!(c.data.labels_per_class, Some(5));
        assert_eq!(c.ssl.tau_c, 0.95);
        assert_eq!(c.ssl_config().seed, 3);
        assert_eq!(c, ExperimentConfig::new(3, GeneratorKind::TwoMoons, 200));
    }

    #[test]
    fn overrides_patch_nested_keys() {
        let sets = ["ssl.lambda_u=0".to_string(), "ssl.divergence=kl".into(), "data.labels_per_class=null".into()];
        let c = ExperimentConfig::from_json(MINIMAL, &sets).unwrap();
        assert_eq!(c.ssl.lambda_u, 0.0);
        assert_eq!(c.ssl.divergence, npssl::ssl::DivergenceKind::Kl);
        assert_eq!(c.data.labels_per_class, None);
    }

    #[test]
    fn unknown_and_missing_fields_are_named() {
        let e = ExperimentConfig::from_json(MINIMAL, &["ssl.nope=1".into()]).unwrap_err();
        assert!(e.to_string().contains("nope"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"seed": 1, "data": {"kind": "two_moons"}}"#, &[]).unwrap_err();
        assert!(e.to_string().contains("`n`"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn invalid_values_rejected() {
        for set in ["ssl.tau_c=1.5", "bench.repeats=2", "data.test_fraction=1.0", "data.n=1"] {
            assert!(ExperimentConfig::from_json(MINIMAL, &[set.to_string()]).is_err(), "{set}");
        }
        assert!(ExperimentConfig::from_json(MINIMAL, &["novalue".into()]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let c = ExperimentConfig::from_json(MINIMAL, &[]).unwrap();
        assert_eq!(ExperimentConfig::from_json(&c.to_json(), &[]).unwrap(), c);
    }
}
