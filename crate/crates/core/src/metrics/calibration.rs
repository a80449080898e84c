use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::np::Prediction;
use crate::scalar::Scalar;

/// Fraction of mismatched labels.
pub fn error_rate(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::shape("error_rate", format!("{} predictions for {} labels", pred.len(), truth.len())));
    }
    if truth.is_empty() {
        return Err(Error::Empty("error_rate"));
    }
    let wrong = pred.iter().zip(truth).filter(|(a, b)| a != b).count();
    Ok(wrong as f64 / truth.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// Zero for empty bins.
    pub error_rate: f64,
    /// Zero for empty bins.
    pub mean_uncertainty: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub bins: Vec<CalibrationBin>,
    pub uce: f64,
}

impl CalibrationReport {
    pub fn edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.bins.iter().map(|b| b.lower).collect();
        e.extend(self.bins.last().map(|b| b.upper));
        e
    }

    pub const CSV_HEADER: [&'static str; 7] =
        ["bin", "lower", "upper", "count", "error_rate", "mean_uncertainty", "contribution"];

    /// One row per bin; `contribution` is the bin's weighted share of the UCE.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(Self::CSV_HEADER)?;
        let n: usize = self.bins.iter().map(|b| b.count).sum();
        for (k, b) in self.bins.iter().enumerate() {
            let contrib = if n == 0 {
                0.0
            } else {
                b.count as f64 / n as f64 * (b.error_rate - b.mean_uncertainty).abs()
            };
            wr.write_record([
                k.to_string(),
                b.lower.to_string(),
                b.upper.to_string(),
                b.count.to_string(),
                b.error_rate.to_string(),
                b.mean_uncertainty.to_string(),
                contrib.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// UCE over equal-width bins of `[0, 1]`; an uncertainty of exactly 1 goes in the last bin.
///
/// `normalized` must already lie in `[0, 1]`.
pub fn expected_uce_raw(wrong: &[bool], normalized: &[f64], n_bins: usize) -> Result<CalibrationReport> {
    if n_bins < 2 {
        return Err(Error::invalid("expected_uce needs at least 2 bins"));
    }
    if wrong.len() != normalized.len() {
        return Err(Error::shape("expected_uce", "flags and uncertainties differ in length"));
    }
    if wrong.is_empty() {
        return Err(Error::Empty("expected_uce"));
    }
    if normalized.iter().any(|u| !(0.0..=1.0).contains(u)) {
        return Err(Error::invalid("normalized uncertainties must lie in [0, 1]"));
    }
    let mut count = vec![0usize; n_bins];
    let mut errs = vec![0usize; n_bins];
    let mut usum = vec![0.0f64; n_bins];
    for (&w, &u) in wrong.iter().zip(normalized) {
        let b = ((u * n_bins as f64) as usize).min(n_bins - 1);
        count[b] += 1;
        errs[b] += usize::from(w);
        usum[b] += u;
    }
    let n = wrong.len() as f64;
    let mut uce = 0.0;
    let bins = (0..n_bins)
        .map(|b| {
            let (e, m) = if count[b] == 0 {
                (0.0, 0.0)
            } else {
                (errs[b] as f64 / count[b] as f64, usum[b] / count[b] as f64)
            };
            uce += count[b] as f64 / n * (e - m).abs();
            CalibrationBin {
                lower: b as f64 / n_bins as f64,
                upper: (b + 1) as f64 / n_bins as f64,
                count: count[b],
                error_rate: e,
                mean_uncertainty: m,
            }
        })
        .collect();
    Ok(CalibrationReport { bins, uce })
}

/// Expected UCE of a prediction batch, with uncertainty normalized by the maximum entropy.
pub fn expected_uce<T: Scalar>(pred: &Prediction<T>, truth: &[usize], n_bins: usize) -> Result<CalibrationReport> {
    if pred.len() != truth.len() {
        return Err(Error::shape("expected_uce", "prediction and label counts differ"));
    }
    if pred.uncertainty().iter().any(|u| !u.is_finite()) {
        return Err(Error::NonFinite("expected_uce uncertainty"));
    }
    let max_h: f64 = pred.base().max_entropy(pred.num_classes());
    let wrong: Vec<bool> = pred.predicted_labels().iter().zip(truth).map(|(a, b)| a != b).collect();
    let norm: Vec<f64> = pred
        .uncertainty()
        .iter()
        .map(|u| (u.to_f64_lossy() / max_h).clamp(0.0, 1.0))
        .collect();
    expected_uce_raw(&wrong, &norm, n_bins)
}

/// Patch accuracy versus patch uncertainty over groups of consecutive samples.
///
/// A group is accurate when at least half of its samples are; it is certain
/// when its mean uncertainty is below `threshold`. A trailing short group counts.
pub fn pavpu(accurate: &[bool], uncertainty: &[f64], threshold: f64, group_size: usize) -> Result<f64> {
    if group_size == 0 {
        return Err(Error::invalid("pavpu group_size must be at least 1"));
    }
    if accurate.len() != uncertainty.len() {
        return Err(Error::shape("pavpu", "flags and uncertainties differ in length"));
    }
    if accurate.is_empty() {
        return Err(Error::Empty("pavpu"));
    }
    let (mut good, mut total) = (0usize, 0usize);
    for (acc, unc) in accurate.chunks(group_size).zip(uncertainty.chunks(group_size)) {
        let n_acc = acc.iter().filter(|&&a| a).count();
        let is_acc = 2 * n_acc >= acc.len();
        let is_certain = (unc.iter().sum::<f64>() / unc.len() as f64) < threshold;
        if is_acc == is_certain {
            good += 1;
        }
        total += 1;
    }
    Ok(good as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_rate_cases() {
        assert_eq!(error_rate(&[1, 2, 3], &[1, 2, 3]).unwrap(), 0.0);
        assert_eq!(error_rate(&[0, 0], &[1, 1]).unwrap(), 1.0);
        let truth = [0; 10];
        let pred = [0, 1, 0, 1, 0, 0, 1, 0, 0, 0];
        assert!((error_rate(&pred, &truth).unwrap() - 0.3).abs() < 1e-15);
        assert!(error_rate(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn uce_extremes() {
        let r = expected_uce_raw(&[false; 5], &[0.0; 5], 10).unwrap();
        assert_eq!(r.uce, 0.0);
        let r = expected_uce_raw(&[true; 5], &[1.0; 5], 10).unwrap();
        assert_eq!(r.uce, 0.0);
        assert_eq!(r.bins[9].count, 5);
    }

    #[test]
    fn uce_six_samples_three_bins() {
        // bins [0,1/3), [1/3,2/3), [2/3,1]
        let wrong = [false, true, false, false, true, true];
        let unc = [0.1, 0.2, 0.5, 0.6, 0.9, 0.7];
        let r = expected_uce_raw(&wrong, &unc, 3).unwrap();
        let b0 = (0.5f64 - 0.15).abs();
        let b1 = (0.0f64 - 0.55).abs();
        let b2 = (1.0f64 - 0.8).abs();
        let expect = (2.0 * b0 + 2.0 * b1 + 2.0 * b2) / 6.0;
        assert!((r.uce - expect).abs() < 1e-15);
        assert_eq!(r.edges().len(), 4);
    }

    #[test]
    fn uce_rejects_bad_input() {
        assert!(expected_uce_raw(&[], &[], 10).is_err());
        assert!(expected_uce_raw(&[true], &[0.5], 1).is_err());
        assert!(expected_uce_raw(&[true], &[1.5], 4).is_err());
    }

    #[test]
    fn pavpu_cases() {
        assert_eq!(pavpu(&[true; 4], &[0.1; 4], 0.4, 1).unwrap(), 1.0);
        assert_eq!(pavpu(&[true; 4], &[0.9; 4], 0.4, 1).unwrap(), 0.0);
        // groups: (T,T | .1,.2) ac; (F,F | .8,.9) iu; (T,F | .1,.1) ac (tie); (F,F | .1,.3) ic
        let acc = [true, true, false, false, true, false, false, false];
        let unc = [0.1, 0.2, 0.8, 0.9, 0.1, 0.1, 0.1, 0.3];
        assert_eq!(pavpu(&acc, &unc, 0.4, 2).unwrap(), 0.75);
        assert!(pavpu(&[], &[], 0.4, 1).is_err());
        assert!(pavpu(&[true], &[0.1], 0.4, 0).is_err());
    }

    #[test]
    fn csv_has_one_row_per_bin() {
        let r = expected_uce_raw(&[true, false], &[0.2, 0.7], 4).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("bin,lower,upper,count,error_rate,mean_uncertainty,contribution"));
    }
}
