//! Accuracy, uncertainty calibration and the uncertainty-latency benchmark.

mod calibration;
mod latency;

pub use calibration::{error_rate, expected_uce, expected_uce_raw, pavpu, CalibrationBin, CalibrationReport};
pub use latency::{bench_uncertainty_latency, mean_std, LatencyRow, LatencyTable, METHOD_MC, METHOD_NP};
