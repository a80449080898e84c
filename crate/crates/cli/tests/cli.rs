//! End-to-end runs of the `npssl` binary on tiny configs.

use std::path::Path;
use std::process::{Command, Output};

use npssl_cli::commands::{
    ABLATION_FILE, ABLATION_SUMMARY_FILE, CALIBRATION_FILE, CHECKPOINT_FILE, EVAL_FILE, LATENCY_FILE, MANIFEST_FILE,
    METRICS_FILE, SUMMARY_FILE,
};
use npssl_cli::manifest::{EvalSummary, Manifest};
use serde_json::Value;

fn npssl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npssl"))
        .args(args)
        .env("NPSSL_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = npssl(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Tiny two-moons run: 200 points, 30 iterations, small network.
fn write_config(dir: &Path, name: &str) -> String {
    let cfg = serde_json::json!({
        "seed": 5,
        "data": { "kind": "two_moons", "n": 200 },
        "model": { "backbone": [16] },
        "ssl": { "iterations": 30, "samples": 3, "batch_size": 8, "mu": 2, "log_every": 10, "ema_momentum": 0.9 },
        "bench": { "ts": [1, 2], "repeats": 3, "batch": 16, "widths": [16, 16] },
        "ablation": { "seeds": 2 },
        "output_dir": dir.join(name),
    });
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

#[test]
fn gen_data_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "gen");
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    ok(&["gen-data", "--config", &cfg, "--out", a.to_str().unwrap()]);
    ok(&["gen-data", "--config", &cfg, "--out", b.to_str().unwrap()]);
    let text = read(&a);
    assert_eq!(text, read(&b));
    assert_eq!(text.lines().count(), 201);
    assert_eq!(text.lines().next().unwrap(), "f0,f1,label");
    assert!(tmp.path().join("a.spec.json").exists());
}

#[test]
fn missing_required_field_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    std::fs::write(&path, r#"{ "data": { "kind": "two_moons", "n": 100 } }"#).unwrap();
    let out = npssl(&["train", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn invalid_override_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad_override");
    let out = npssl(&["train", "--config", &cfg, "--set", "ssl.tau_c=2.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_label_budget_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "infeasible");
    let out = npssl(&["train", "--config", &cfg, "--set", "data.labels_per_class=500"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn train_is_reproducible_and_eval_matches_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "r1");
    ok(&["train", "--config", &cfg]);
    ok(&["train", "--config", &cfg, "--set", &format!("output_dir=\"{}\"", tmp.path().join("r2").display())]);
    let (r1, r2) = (tmp.path().join("r1"), tmp.path().join("r2"));
    for f in [METRICS_FILE, CHECKPOINT_FILE, SUMMARY_FILE, CALIBRATION_FILE] {
        assert_eq!(read(r1.join(f)), read(r2.join(f)), "{f} differs");
    }

    let metrics = read(r1.join(METRICS_FILE));
    let mut rows = csv::Reader::from_reader(metrics.as_bytes());
    let headers = rows.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "alpha_u").unwrap();
    let mut n = 0;
    for rec in rows.records() {
        let a: f64 = rec.unwrap()[col].parse().unwrap();
        assert!((0.0..=1.0).contains(&a));
        n += 1;
    }
    assert_eq!(n, 3);

    let manifest = Manifest::load(&r1.join(MANIFEST_FILE)).unwrap();
    assert_eq!(manifest.seed, 5);
    assert_eq!(manifest.split.labeled, 10);
    assert!(!manifest.deviations.is_empty());

    let summary: EvalSummary = serde_json::from_str(&read(r1.join(SUMMARY_FILE))).unwrap();
    ok(&["eval", "--run", r1.to_str().unwrap()]);
    let eval: EvalSummary = serde_json::from_str(&read(r1.join(EVAL_FILE))).unwrap();
    assert_eq!(summary, eval);
    assert!((0.0..=1.0).contains(&summary.uce));
}

#[test]
fn eval_rejects_foreign_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "foreign");
    ok(&["train", "--config", &cfg]);
    let run = tmp.path().join("foreign");
    let mut m: Value = serde_json::from_str(&read(run.join(MANIFEST_FILE))).unwrap();
    m["config"]["ssl"]["beta"] = serde_json::json!(0.5);
    std::fs::write(run.join(MANIFEST_FILE), m.to_string()).unwrap();
    let out = npssl(&["eval", "--run", run.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

fn std_oracle(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[test]
fn ablation_covers_every_kind_and_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "abl");
    ok(&["ablate-divergence", "--config", &cfg]);
    let dir = tmp.path().join("abl");
    let runs = read(dir.join(ABLATION_FILE));
    let mut rows = csv::Reader::from_reader(runs.as_bytes());
    let recs: Vec<csv::StringRecord> = rows.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 3 * 2);

    let summary = read(dir.join(ABLATION_SUMMARY_FILE));
    let mut srows = csv::Reader::from_reader(summary.as_bytes());
    let sh = srows.headers().unwrap().clone();
    let h = rows.headers().unwrap().clone();
    let (kc, ec) = (h.iter().position(|c| c == "divergence").unwrap(), h.iter().position(|c| c == "error_rate").unwrap());
    let (skc, ssc) = (sh.iter().position(|c| c == "divergence").unwrap(), sh.iter().position(|c| c == "std_error").unwrap());
    let mut kinds = 0;
    for s in srows.records() {
        let s = s.unwrap();
        let errs: Vec<f64> = recs.iter().filter(|r| r[kc] == s[skc]).map(|r| r[ec].parse().unwrap()).collect();
        assert_eq!(errs.len(), 2);
        let std: f64 = s[ssc].parse().unwrap();
        assert!((std - std_oracle(&errs)).abs() < 1e-12);
        kinds += 1;
    }
    assert_eq!(kinds, 3);
}

#[test]
fn bench_reports_both_methods_at_every_t() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bench");
    ok(&["bench", "--config", &cfg]);
    let text = read(tmp.path().join("bench").join(LATENCY_FILE));
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let h = rows.headers().unwrap().clone();
    let rc = h.iter().position(|c| c == "repeats").unwrap();
    let recs: Vec<csv::StringRecord> = rows.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 2 * 2);
    assert!(recs.iter().all(|r| r[rc].parse::<usize>().unwrap() >= 3));
}
