use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Number of labeled samples drawn from each class's training pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelBudget {
    PerClass(usize),
    All,
}

/// Disjoint index sets covering the dataset; each list is sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SslSplit {
    pub labeled: Vec<usize>,
    pub unlabeled: Vec<usize>,
    pub test: Vec<usize>,
}

fn by_class(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); k];
    for (i, &y) in labels.iter().enumerate() {
        out[y].push(i);
    }
    out
}

/// Stratified split: a `test_fraction` share of each class is held out, then
/// the labeled budget is drawn per class from what remains.
pub fn split_ssl(labels: &[usize], budget: LabelBudget, test_fraction: f64, seed: u64) -> Result<SslSplit> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::invalid("test_fraction must lie in [0, 1)"));
    }
    if budget == LabelBudget::PerClass(0) {
        return Err(Error::invalid("need at least one labeled sample per class"));
    }
    let mut rng = rng_from_seed(seed);
    let mut split = SslSplit::default();
    for (k, mut idx) in by_class(labels).into_iter().enumerate() {
        if idx.is_empty() {
            return Err(Error::Infeasible(format!("class {k} has no samples")));
        }
        idx.shuffle(&mut rng);
        let n_test = (test_fraction * idx.len() as f64).round() as usize;
        let (test, train) = idx.split_at(n_test);
        let n_lab = match budget {
            LabelBudget::All => train.len(),
            LabelBudget::PerClass(m) => m,
        };
        if n_lab > train.len() || n_lab == 0 {
            return Err(Error::Infeasible(format!(
                "class {k}: {n_lab} labeled requested, {} available after the test split",
                train.len()
            )));
        }
        split.test.extend_from_slice(test);
        split.labeled.extend_from_slice(&train[..n_lab]);
        split.unlabeled.extend_from_slice(&train[n_lab..]);
    }
    split.labeled.sort_unstable();
    split.unlabeled.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Keeps `round(N1 γ^(-k/(K-1)))` samples of class `k`; returns sorted indices.
pub fn make_imbalanced(labels: &[usize], n1: usize, gamma: f64, seed: u64) -> Result<Vec<usize>> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma must be finite and >= 1"));
    }
    let classes = by_class(labels);
    let targets = imbalanced_counts(classes.len(), n1, gamma);
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    for (k, (mut idx, &want)) in classes.into_iter().zip(&targets).enumerate() {
        if want == 0 || want > idx.len() {
            return Err(Error::Infeasible(format!("class {k} needs {want} samples, has {}", idx.len())));
        }
        idx.shuffle(&mut rng);
        out.extend_from_slice(&idx[..want]);
    }
    out.sort_unstable();
    Ok(out)
}

/// Target counts `n_k` of [`make_imbalanced`].
pub fn imbalanced_counts(k: usize, n1: usize, gamma: f64) -> Vec<usize> {
    (0..k)
        .map(|c| {
            if k == 1 {
                n1
            } else {
                (n1 as f64 * gamma.powf(-(c as f64) / (k - 1) as f64)).round() as usize
            }
        })
        .collect()
}
