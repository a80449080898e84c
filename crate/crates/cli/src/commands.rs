use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use npssl::datasets::{read_dataset_csv, save_dataset};
use npssl::metrics::{bench_uncertainty_latency, mean_std, CalibrationReport, LatencyTable};
use npssl::np::Checkpoint;
use npssl::NpModel;
use npssl::rng::SeedStreams;
use npssl::ssl::{eval_stream, train_np, write_metrics_csv, DivergenceKind, McDropoutConfig, McDropoutModel, RunRecord};
use npssl::Tensor;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::data::{dataset_spec, prepare, Prepared};
use crate::error::{CliError, CliResult};
use crate::manifest::{summarize, EvalSummary, Manifest};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CALIBRATION_FILE: &str = "calibration.csv";
pub const DATA_FILE: &str = "data.csv";
pub const ABLATION_FILE: &str = "ablation.csv";
pub const ABLATION_SUMMARY_FILE: &str = "ablation_summary.csv";
pub const LATENCY_FILE: &str = "latency.csv";
pub const EVAL_FILE: &str = "eval.json";
pub const THREADS_ENV: &str = "NPSSL_THREADS";

fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))
}

/// Writes the generated dataset and its sidecar; returns the CSV path.
pub fn gen_data(cfg: &ExperimentConfig, out: Option<&Path>) -> CliResult<PathBuf> {
    let spec = dataset_spec(cfg);
    let data = npssl::datasets::generate::<f64>(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => cfg.output_dir.join(DATA_FILE),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    save_dataset(&path, &data, &spec).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Outcome of one in-memory training run.
#[derive(Clone, Debug)]
pub struct TrainReport {
    pub model: NpModel,
    pub records: Vec<RunRecord>,
    pub summary: Option<EvalSummary>,
    pub calibration: Option<CalibrationReport>,
}

/// Trains on already prepared data without touching the filesystem.
pub fn train_prepared(cfg: &ExperimentConfig, prepared: &Prepared) -> CliResult<TrainReport> {
    let data = prepared.ssl_data()?;
    let np = cfg
        .model
        .np_config(prepared.dataset.x.cols(), prepared.dataset.num_classes, cfg.ssl.samples);
    let out = train_np(&np, &data, &cfg.ssl_config(), |_| {}).map_err(|e| CliError::from_core("training", e))?;
    let (summary, calibration) = match &out.test_prediction {
        Some(p) => {
            let (s, c) = summarize(p, &data.test.y, &cfg.metrics)?;
            (Some(s), Some(c))
        }
        None => (None, None),
    };
    Ok(TrainReport {
        model: out.model,
        records: out.records,
        summary,
        calibration,
    })
}

/// Full run: writes manifest, metrics CSV, checkpoint, summary and
/// calibration table into `cfg.output_dir`.
pub fn train(cfg: &ExperimentConfig) -> CliResult<TrainReport> {
    let prepared = prepare(cfg)?;
    let dir = &cfg.output_dir;
    create_dir(dir)?;
    let manifest = Manifest::new("train", cfg, prepared.spec.clone(), prepared.sizes())?;
    fs::write(dir.join(MANIFEST_FILE), manifest.to_json())?;

    let report = train_prepared(cfg, &prepared)?;
    let f = BufWriter::new(File::create(dir.join(METRICS_FILE))?);
    write_metrics_csv(f, &report.records).map_err(|e| CliError::Data(e.to_string()))?;
    let ck = Checkpoint::from_model(&report.model, cfg.seed, manifest.config_hash.clone())
        .map_err(|e| CliError::from_core("checkpoint", e))?;
    ck.save(&dir.join(CHECKPOINT_FILE)).map_err(|e| CliError::Data(e.to_string()))?;
    if let (Some(s), Some(c)) = (&report.summary, &report.calibration) {
        write_json(&dir.join(SUMMARY_FILE), s)?;
        let f = BufWriter::new(File::create(dir.join(CALIBRATION_FILE))?);
        c.write_csv(f).map_err(|e| CliError::Data(e.to_string()))?;
    }
    Ok(report)
}

/// Worker pool sized by `NPSSL_THREADS` (all cores when unset).
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub divergence: DivergenceKind,
    pub seed: u64,
    pub accuracy: f64,
    pub error_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationSummaryRow {
    pub divergence: DivergenceKind,
    pub runs: usize,
    pub mean_error: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub summary: Vec<AblationSummaryRow>,
}

impl AblationReport {
    pub fn mean_error(&self, kind: DivergenceKind) -> Option<f64> {
        self.summary.iter().find(|s| s.divergence == kind).map(|s| s.mean_error)
    }
}

/// Final test error of every divergence on seeds `seed..seed + ablation.seeds`.
/// Kinds sharing a seed share its data split.
pub fn ablate_in_memory(cfg: &ExperimentConfig) -> CliResult<AblationReport> {
    let seeds: Vec<u64> = (0..cfg.ablation.seeds as u64).map(|k| cfg.seed + k).collect();
    let prepared: Vec<Prepared> = seeds
        .iter()
        .map(|&s| prepare(&ExperimentConfig { seed: s, ..cfg.clone() }))
        .collect::<CliResult<_>>()?;
    let jobs: Vec<(DivergenceKind, usize)> = DivergenceKind::ALL
        .iter()
        .flat_map(|&k| (0..seeds.len()).map(move |i| (k, i)))
        .collect();
    let pool = thread_pool()?;
    let rows: Vec<AblationRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(kind, i)| {
                let mut run = cfg.clone();
                run.seed = seeds[i];
                run.ssl.divergence = kind;
                let rep = train_prepared(&run, &prepared[i])?;
                let s = rep
                    .summary
                    .ok_or_else(|| CliError::Data("ablation needs a non-empty test split".into()))?;
                Ok(AblationRow {
                    divergence: kind,
                    seed: seeds[i],
                    accuracy: s.accuracy,
                    error_rate: s.error_rate,
                })
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let summary = DivergenceKind::ALL
        .iter()
        .map(|&k| {
            let errs: Vec<f64> = rows.iter().filter(|r| r.divergence == k).map(|r| r.error_rate).collect();
            let (mean_error, std_error) = mean_std(&errs);
            AblationSummaryRow {
                divergence: k,
                runs: errs.len(),
                mean_error,
                std_error,
            }
        })
        .collect();
    Ok(AblationReport { rows, summary })
}

fn write_csv_rows<S: Serialize>(path: &Path, rows: &[S]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Data(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Data(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn ablate(cfg: &ExperimentConfig) -> CliResult<AblationReport> {
    create_dir(&cfg.output_dir)?;
    let report = ablate_in_memory(cfg)?;
    let prepared = prepare(cfg)?;
    let manifest = Manifest::new("ablate-divergence", cfg, prepared.spec.clone(), prepared.sizes())?;
    fs::write(cfg.output_dir.join(MANIFEST_FILE), manifest.to_json())?;
    write_csv_rows(&cfg.output_dir.join(ABLATION_FILE), &report.rows)?;
    write_csv_rows(&cfg.output_dir.join(ABLATION_SUMMARY_FILE), &report.summary)?;
    Ok(report)
}

/// Times NP and MC-dropout uncertainty estimation on untrained networks
/// with the same hidden widths.
pub fn bench_in_memory(cfg: &ExperimentConfig) -> CliResult<LatencyTable> {
    let (d, c) = (cfg.data.feature_dim, cfg.data.classes);
    let b = &cfg.bench;
    let streams = SeedStreams::new(cfg.seed);
    let mut init = streams.stream(SeedStreams::INIT);
    let mut np_cfg = cfg.model.np_config(d, c, 1);
    np_cfg.backbone = b.widths.clone();
    let mut np = NpModel::new(np_cfg, &mut init).map_err(|e| CliError::Config(e.to_string()))?;
    // Inference needs a context; one labeled row per class suffices.
    let ctx_x = Tensor::from_fn(c, d, |i, j| (i + j) as f64 * 0.1);
    let ctx_y: Vec<usize> = (0..c).collect();
    np.latent_path(&ctx_x, &ctx_y).map_err(|e| CliError::from_core("bench", e))?;
    np.deterministic_path(&ctx_x, &ctx_y).map_err(|e| CliError::from_core("bench", e))?;
    np.finalize().map_err(|e| CliError::from_core("bench", e))?;
    let mc = McDropoutModel::new(
        McDropoutConfig {
            input_dim: d,
            num_classes: c,
            hidden: b.widths.clone(),
            dropout: b.dropout,
            samples: 1,
        },
        &mut init,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let mut data_rng = streams.stream("bench/batch");
    let batch = Tensor::from_fn(b.batch, d, |_, _| StandardNormal.sample(&mut data_rng));
    bench_uncertainty_latency(&np, &mc, &b.ts, b.repeats, &batch, streams.seed_for("bench/noise"))
        .map_err(|e| CliError::from_core("bench", e))
}

pub fn bench(cfg: &ExperimentConfig) -> CliResult<LatencyTable> {
    create_dir(&cfg.output_dir)?;
    let table = bench_in_memory(cfg)?;
    let f = BufWriter::new(File::create(cfg.output_dir.join(LATENCY_FILE))?);
    table.write_csv(f).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(table)
}

/// Re-evaluates a run's checkpoint on its own test split, or on `data` when given.
pub fn eval(run_dir: &Path, data: Option<&Path>) -> CliResult<EvalSummary> {
    let manifest = Manifest::load(&run_dir.join(MANIFEST_FILE))?;
    let cfg = manifest.config;
    let ck = Checkpoint::load(&run_dir.join(CHECKPOINT_FILE))
        .map_err(|e| CliError::Data(format!("checkpoint: {e}")))?;
    let hash = cfg.hash()?;
    if ck.config_hash != hash {
        return Err(CliError::Data("checkpoint does not belong to this run's config".into()));
    }
    let model: NpModel = ck.to_model().map_err(|e| CliError::Data(format!("checkpoint: {e}")))?;
    let (x, y) = match data {
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            let d = read_dataset_csv::<f64, _>(f, cfg.data.classes).map_err(|e| CliError::Data(e.to_string()))?;
            (d.x, d.y)
        }
        None => {
            let p = prepare(&cfg)?;
            let t = p.dataset.subset(&p.split.test);
            (t.x, t.y)
        }
    };
    if y.is_empty() {
        return Err(CliError::Data("evaluation set is empty".into()));
    }
    let mut rng = SeedStreams::new(cfg.seed).stream(&eval_stream("final"));
    let pred = model
        .predict(&x, cfg.ssl.entropy_base, Some(&mut rng))
        .map_err(|e| CliError::from_core("evaluation", e))?;
    let (summary, _) = summarize(&pred, &y, &cfg.metrics)?;
    write_json(&run_dir.join(EVAL_FILE), &summary)?;
    Ok(summary)
}
