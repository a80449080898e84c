//! Experiment runner: config parsing, subcommands, run manifests.
//!
//! A run is described by one JSON [`config::ExperimentConfig`]; every
//! subcommand takes `--config path` plus any number of `--set key=value`
//! overrides addressing flat key paths such as `ssl.lambda_u`.

pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "npssl", version, about = "Neural-process semi-supervised classification experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Experiment config JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Override a config value, e.g. `--set ssl.divergence=kl`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ConfigArgs {
    pub fn load(&self) -> CliResult<ExperimentConfig> {
        ExperimentConfig::load(&self.config, &self.overrides)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the configured synthetic dataset (CSV plus spec sidecar).
    GenData {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output CSV path; defaults to `<output_dir>/data.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train one model and write manifest, metrics, checkpoint and summary.
    Train {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Compare KL, skew-geometric JS and its dual over several seeds.
    AblateDivergence {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Time NP and MC-dropout uncertainty estimation across sample counts.
    Bench {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Re-evaluate a run directory's checkpoint.
    Eval {
        /// Directory written by `train`.
        #[arg(long)]
        run: PathBuf,
        /// Labeled CSV to evaluate on instead of the run's test split.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

/// Executes a parsed command; returns the text to print on success.
pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::GenData { cfg, out } => {
            let c = cfg.load()?;
            let path = commands::gen_data(&c, out.as_deref())?;
            Ok(format!("wrote {} ({} rows)", path.display(), c.data.n))
        }
        Command::Train { cfg } => {
            let c = cfg.load()?;
            let rep = commands::train(&c)?;
            let mut s = format!("run directory: {}", c.output_dir.display());
            if let Some(sum) = rep.summary {
                s.push_str(&format!(
                    "\ntest accuracy {:.4}  uce {:.4}  pavpu {:.4}",
                    sum.accuracy, sum.uce, sum.pavpu
                ));
            }
            Ok(s)
        }
        Command::AblateDivergence { cfg } => {
            let c = cfg.load()?;
            let rep = commands::ablate(&c)?;
            let lines: Vec<String> = rep
                .summary
                .iter()
                .map(|r| format!("{:<8} error {:.4} +/- {:.4} ({} runs)", r.divergence.name(), r.mean_error, r.std_error, r.runs))
                .collect();
            Ok(lines.join("\n"))
        }
        Command::Bench { cfg } => {
            let c = cfg.load()?;
            let table = commands::bench(&c)?;
            let lines: Vec<String> = table
                .rows
                .iter()
                .map(|r| format!("{:<10} T={:<3} {:.3} ms +/- {:.3}", r.method, r.t, r.mean_ms, r.std_ms))
                .collect();
            Ok(lines.join("\n"))
        }
        Command::Eval { run, data } => {
            let s = commands::eval(&run, data.as_deref())?;
            Ok(serde_json::to_string_pretty(&s).expect("summary serializes"))
        }
    }
}
