use npssl::datasets::DatasetSpec;
use npssl::metrics::{expected_uce, pavpu, CalibrationReport};
use npssl::Prediction;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, MetricsConfig};
use crate::data::SplitSizes;
use crate::error::{CliError, CliResult};

/// Known departures from the reference method, copied into every manifest.
pub const DEVIATIONS: &[&str] = &[
    "memory banks start from a single zero vector instead of a random vector",
    "training-mode aggregation uses the current batch only; memory banks feed inference",
    "an MLP backbone stands in for the convolutional feature extractor",
    "metrics CSV carries an extra alpha_u column",
    "pseudo-labels come from the live model in inference mode; curriculum thresholding is not used",
    "learning rate follows a half-cosine decay over the run",
];

/// Everything needed to rerun an experiment exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub command: String,
    pub code_version: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: ExperimentConfig,
    /// Spec of the dataset actually used, including its derived seed.
    pub dataset: DatasetSpec,
    pub split: SplitSizesRecord,
    pub deviations: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSizesRecord {
    pub labeled: usize,
    pub unlabeled: usize,
    pub test: usize,
}

impl From<SplitSizes> for SplitSizesRecord {
    fn from(s: SplitSizes) -> Self {
        Self {
            labeled: s.labeled,
            unlabeled: s.unlabeled,
            test: s.test,
        }
    }
}

impl Manifest {
    pub fn new(command: &str, cfg: &ExperimentConfig, dataset: DatasetSpec, split: SplitSizes) -> CliResult<Self> {
        Ok(Self {
            command: command.to_string(),
            code_version: npssl::VERSION.to_string(),
            seed: cfg.seed,
            config_hash: cfg.hash()?,
            config: cfg.clone(),
            dataset,
            split: split.into(),
            deviations: DEVIATIONS.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

/// Test-set accuracy and uncertainty quality of a prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSummary {
    pub n_test: usize,
    pub accuracy: f64,
    pub error_rate: f64,
    pub uce: f64,
    pub pavpu: f64,
    pub mean_uncertainty: f64,
    /// `None` when no test sample falls in the subset.
    pub mean_uncertainty_correct: Option<f64>,
    pub mean_uncertainty_wrong: Option<f64>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn summarize(pred: &Prediction, truth: &[usize], m: &MetricsConfig) -> CliResult<(EvalSummary, CalibrationReport)> {
    let core = |e| CliError::from_core("evaluation", e);
    let labels = pred.predicted_labels();
    let correct: Vec<bool> = labels.iter().zip(truth).map(|(a, b)| a == b).collect();
    let unc = pred.uncertainty();
    let report = expected_uce(pred, truth, m.uce_bins).map_err(core)?;
    let pv = pavpu(&correct, unc, m.pavpu_threshold, m.pavpu_group).map_err(core)?;
    let (mut ok, mut bad) = (Vec::new(), Vec::new());
    for (&c, &u) in correct.iter().zip(unc) {
        if c { ok.push(u) } else { bad.push(u) }
    }
    let acc = correct.iter().filter(|&&c| c).count() as f64 / truth.len().max(1) as f64;
    let summary = EvalSummary {
        n_test: truth.len(),
        accuracy: acc,
        error_rate: 1.0 - acc,
        uce: report.uce,
        pavpu: pv,
        mean_uncertainty: mean(unc).unwrap_or(0.0),
        mean_uncertainty_correct: mean(&ok),
        mean_uncertainty_wrong: mean(&bad),
    };
    Ok((summary, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use npssl::gaussian::LogBase;
    use npssl::Tensor;

    #[test]
    fn summary_splits_uncertainty_by_correctness() {
        let probs = Tensor::new(4, 2, vec![0.9, 0.1, 0.6, 0.4, 0.2, 0.8, 0.5, 0.5]).unwrap();
        let pred = Prediction::from_samples(&probs, 1, LogBase::Two).unwrap();
        let (s, rep) = summarize(&pred, &[0, 1, 1, 0], &MetricsConfig::default()).unwrap();
        assert_eq!(s.accuracy, 0.75);
        assert!((s.error_rate - 0.25).abs() < 1e-15);
        assert_eq!(rep.bins.len(), 10);
        let wrong = s.mean_uncertainty_wrong.unwrap();
        assert!(wrong > s.mean_uncertainty_correct.unwrap());
    }
}
