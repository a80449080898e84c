use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One logged training iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub iter: usize,
    pub l_cls: f64,
    pub l_u: f64,
    pub divergence: f64,
    pub alpha_u: f64,
    pub n_selected: usize,
    pub train_acc: f64,
    pub test_acc: f64,
    pub mean_uncertainty: f64,
    /// Present only when wall-time logging is enabled.
    pub wall_ms: Option<f64>,
}

pub const METRICS_HEADER: [&str; 10] = [
    "iter",
    "l_cls",
    "l_u",
    "divergence",
    "alpha_u",
    "n_selected",
    "train_acc",
    "test_acc",
    "mean_uncertainty",
    "wall_ms",
];

pub fn write_metrics_csv<W: Write>(w: W, records: &[RunRecord]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    if records.is_empty() {
        wr.write_record(METRICS_HEADER)?;
    }
    for r in records {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_metrics_csv<R: Read>(r: R) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in rd.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}
