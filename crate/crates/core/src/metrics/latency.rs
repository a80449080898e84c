use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::LogBase;
use crate::np::NpModel;
use crate::numerics::Tensor2;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;
use crate::ssl::McDropoutModel;

pub const METHOD_NP: &str = "np";
pub const METHOD_MC: &str = "mc_dropout";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyRow {
    pub method: String,
    pub t: usize,
    pub mean_ms: f64,
    /// Sample standard deviation over repeats.
    pub std_ms: f64,
    pub repeats: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LatencyTable {
    pub rows: Vec<LatencyRow>,
}

impl LatencyTable {
    pub fn get(&self, method: &str, t: usize) -> Option<&LatencyRow> {
        self.rows.iter().find(|r| r.method == method && r.t == t)
    }

    /// `mean(t_hi) / mean(t_lo)` for one method.
    pub fn ratio(&self, method: &str, t_hi: usize, t_lo: usize) -> Option<f64> {
        Some(self.get(method, t_hi)?.mean_ms / self.get(method, t_lo)?.mean_ms)
    }

    pub const CSV_HEADER: [&'static str; 5] = ["method", "t", "mean_ms", "std_ms", "repeats"];

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        if self.rows.is_empty() {
            wr.write_record(Self::CSV_HEADER)?;
        }
        for r in &self.rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn time_ms<F: FnMut() -> Result<()>>(mut f: F, repeats: usize) -> Result<Vec<f64>> {
    f()?;
    (0..repeats)
        .map(|_| {
            let s = Instant::now();
            f()?;
            Ok(s.elapsed().as_secs_f64() * 1e3)
        })
        .collect()
}

/// Wall-clock time of one predict-with-uncertainty call per method and `T`.
///
/// Each cell runs one untimed warm-up call first. Runs on the calling thread.
pub fn bench_uncertainty_latency<T: Scalar>(
    np: &NpModel<T>,
    mc: &McDropoutModel<T>,
    ts: &[usize],
    repeats: usize,
    batch: &Tensor2<T>,
    seed: u64,
) -> Result<LatencyTable> {
    if repeats < 3 {
        return Err(Error::invalid("latency benchmark needs at least 3 repeats"));
    }
    if ts.is_empty() || ts.contains(&0) {
        return Err(Error::invalid("latency benchmark needs positive sample counts"));
    }
    let mut rows = Vec::new();
    for &t in ts {
        let mut npm = np.clone();
        npm.set_samples(t)?;
        let mut rng = rng_from_seed(seed);
        let times = time_ms(
            || npm.predict(batch, LogBase::Two, Some(&mut rng)).map(drop),
            repeats,
        )?;
        let (mean_ms, std_ms) = mean_std(&times);
        rows.push(LatencyRow { method: METHOD_NP.into(), t, mean_ms, std_ms, repeats });

        let mut mcm = mc.clone();
        mcm.set_samples(t)?;
        let mut rng = rng_from_seed(seed);
        let times = time_ms(|| mcm.predict(batch, LogBase::Two, &mut rng).map(drop), repeats)?;
        let (mean_ms, std_ms) = mean_std(&times);
        rows.push(LatencyRow { method: METHOD_MC.into(), t, mean_ms, std_ms, repeats });
    }
    Ok(LatencyTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::np::NpConfig;
    use crate::ssl::McDropoutConfig;

    #[test]
    fn mean_std_formula() {
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn table_shape_and_repeats() {
        let mut rng = rng_from_seed(0);
        let np = NpModel::<f64>::new(NpConfig { backbone: vec![8], ..Default::default() }, &mut rng).unwrap();
        let mc = McDropoutModel::<f64>::new(McDropoutConfig { hidden: vec![8], ..Default::default() }, &mut rng).unwrap();
        let x = Tensor2::zeros(4, 2);
        assert!(bench_uncertainty_latency(&np, &mc, &[1], 2, &x, 0).is_err());
        let t = bench_uncertainty_latency(&np, &mc, &[1, 2], 3, &x, 0).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(t.rows.iter().all(|r| r.mean_ms > 0.0 && r.repeats == 3));
        assert!(t.ratio(METHOD_MC, 2, 1).is_some());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("method,t,mean_ms,std_ms,repeats"));
    }
}
