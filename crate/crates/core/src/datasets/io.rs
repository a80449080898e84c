use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::generate::{Dataset, DatasetSpec};
use crate::error::{Error, Result};
use crate::numerics::Tensor2;
use crate::scalar::Scalar;

/// Writes `f0..f{d-1},label` rows.
pub fn write_dataset_csv<T: Scalar, W: Write>(w: W, data: &Dataset<T>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (0..data.x.cols()).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    wr.write_record(&header)?;
    for (row, &y) in data.x.iter_rows().zip(&data.y) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_f64_lossy().to_string()).collect();
        rec.push(y.to_string());
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_dataset_csv<T: Scalar, R: Read>(r: R, num_classes: usize) -> Result<Dataset<T>> {
    let mut rd = csv::Reader::from_reader(r);
    let cols = rd.headers()?.len();
    if cols < 2 {
        return Err(Error::Format("dataset csv needs feature columns and a label column".into()));
    }
    let d = cols - 1;
    let mut data = Vec::new();
    let mut y = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        for j in 0..d {
            let v: f64 = rec[j]
                .parse()
                .map_err(|_| Error::Format(format!("row {}: bad feature `{}`", line + 1, &rec[j])))?;
            data.push(T::lit(v));
        }
        let label: usize = rec[d]
            .parse()
            .map_err(|_| Error::Format(format!("row {}: bad label `{}`", line + 1, &rec[d])))?;
        if label >= num_classes {
            return Err(Error::Format(format!("row {}: label {label} out of range", line + 1)));
        }
        y.push(label);
    }
    Ok(Dataset {
        x: Tensor2::new(y.len(), d, data)?,
        y,
        num_classes,
    })
}

/// Sidecar path `data.csv -> data.spec.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("spec.json")
}

/// Writes the CSV and its JSON sidecar spec.
pub fn save_dataset<T: Scalar>(csv_path: &Path, data: &Dataset<T>, spec: &DatasetSpec) -> Result<()> {
    let f = BufWriter::new(File::create(csv_path)?);
    write_dataset_csv(f, data)?;
    let mut s = serde_json::to_string_pretty(spec)?;
    s.push('\n');
    std::fs::write(sidecar_path(csv_path), s)?;
    Ok(())
}

pub fn load_dataset<T: Scalar>(csv_path: &Path) -> Result<(Dataset<T>, DatasetSpec)> {
    let spec: DatasetSpec = serde_json::from_str(&std::fs::read_to_string(sidecar_path(csv_path))?)?;
    let data = read_dataset_csv(File::open(csv_path)?, spec.classes)?;
    Ok((data, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::generate;

    #[test]
    fn csv_roundtrip_exact() {
        let spec = DatasetSpec { n: 50, feature_dim: 3, ..Default::default() };
        let d = generate::<f64>(&spec).unwrap();
        let mut buf = Vec::new();
        write_dataset_csv(&mut buf, &d).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 51);
        let back = read_dataset_csv::<f64, _>(buf.as_slice(), 2).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("moons.csv");
        let spec = DatasetSpec { n: 20, ..Default::default() };
        let d = generate::<f64>(&spec).unwrap();
        save_dataset(&p, &d, &spec).unwrap();
        assert!(dir.path().join("moons.spec.json").exists());
        let (back, s) = load_dataset::<f64>(&p).unwrap();
        assert_eq!(back, d);
        assert_eq!(s, spec);
    }

    #[test]
    fn bad_label_rejected() {
        let text = "f0,f1,label\n0.1,0.2,5\n";
        assert!(read_dataset_csv::<f64, _>(text.as_bytes(), 2).is_err());
    }
}
