use npssl::datasets::{generate, load_dataset, make_imbalanced, split_ssl, Dataset, DatasetSpec, SslSplit};
use npssl::rng::SeedStreams;
use npssl::ssl::SslData;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const STREAM_GENERATE: &str = "data/generate";
pub const STREAM_IMBALANCE: &str = "data/imbalance";
pub const STREAM_SPLIT: &str = "data/split";

/// Dataset, the spec it came from, and its semi-supervised split.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub spec: DatasetSpec,
    pub dataset: Dataset<f64>,
    pub split: SslSplit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplitSizes {
    pub labeled: usize,
    pub unlabeled: usize,
    pub test: usize,
}

impl Prepared {
    pub fn ssl_data(&self) -> CliResult<SslData<f64>> {
        SslData::from_split(&self.dataset, &self.split).map_err(|e| CliError::from_core("dataset", e))
    }

    pub fn sizes(&self) -> SplitSizes {
        SplitSizes {
            labeled: self.split.labeled.len(),
            unlabeled: self.split.unlabeled.len(),
            test: self.split.test.len(),
        }
    }
}

/// Generator spec implied by the config; its seed is derived from the master seed.
pub fn dataset_spec(cfg: &ExperimentConfig) -> DatasetSpec {
    let d = &cfg.data;
    DatasetSpec {
        kind: d.kind,
        n: d.n,
        noise: d.noise,
        classes: d.classes,
        feature_dim: d.feature_dim,
        seed: SeedStreams::new(cfg.seed).seed_for(STREAM_GENERATE),
    }
}

/// Loads or generates the dataset, applies the imbalance and splits it.
pub fn prepare(cfg: &ExperimentConfig) -> CliResult<Prepared> {
    let streams = SeedStreams::new(cfg.seed);
    let (mut dataset, spec) = match &cfg.data.path {
        Some(p) => load_dataset::<f64>(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
        None => {
            let spec = dataset_spec(cfg);
            let d = generate(&spec).map_err(|e| CliError::Config(e.to_string()))?;
            (d, spec)
        }
    };
    if let Some(im) = cfg.data.imbalance {
        let keep = make_imbalanced(&dataset.y, im.n1, im.gamma, streams.seed_for(STREAM_IMBALANCE))
            .map_err(|e| CliError::Data(format!("imbalance: {e}")))?;
        dataset = dataset.subset(&keep);
    }
    let split = split_ssl(
        &dataset.y,
        cfg.data.budget(),
        cfg.data.test_fraction,
        streams.seed_for(STREAM_SPLIT),
    )
    .map_err(|e| CliError::Data(format!("split: {e}")))?;
    Ok(Prepared { spec, dataset, split })
}
