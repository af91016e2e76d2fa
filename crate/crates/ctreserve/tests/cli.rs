use std::fs;
use std::process::{Command, Output};

use ctreserve::report::samples_sha256;
use serde_json::Value;

fn ctreserve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctreserve")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = ctreserve(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn reserve_text_report() {
    let out = ctreserve(&["reserve", "--dataset", "taylor_ashe"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("18680847.77"), "{text}");
    assert!(text.contains("13.0995%"));
    assert!(text.contains("-52.3031"));
}

#[test]
fn reserve_json_schema() {
    let v = json(&["reserve", "--dataset", "mortgage"]);
    for key in ["manifest", "estimates", "summary", "histogram", "diagnostics"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let pct = v["estimates"]["msep_pct"].as_f64().unwrap();
    assert!((pct - 25.6337).abs() < 5e-5);
    assert_eq!(v["estimates"]["factors"].as_array().unwrap().len(), 8);
    assert_eq!(v["summary"][0]["method"], "mack_lognormal");
    assert_eq!(v["manifest"]["source"]["dataset"], "mortgage");
    assert_eq!(v["manifest"]["version"], env!("CARGO_PKG_VERSION"));
    let z = &v["diagnostics"]["zero_mass"];
    assert!((z["max_prob"].as_f64().unwrap() - 0.1636).abs() < 1e-4);
}

#[test]
fn invalid_file_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "dev,1,2,3\n1,100,150,160\n2,110,0\n3,120\n").unwrap();
    let out = ctreserve(&["reserve", "--file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cell (2,2)"), "{}", stderr(&out));

    let out = ctreserve(&["reserve", "--file", bad.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "invalid_triangle");

    let missing = dir.path().join("missing.csv");
    let out = ctreserve(&["reserve", "--file", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reserve_from_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ta.csv");
    let t = ctreserve::core::Dataset::TaylorAshe.triangle();
    fs::write(&path, ctreserve::csv::serialize_triangle(&t)).unwrap();
    let from_file = json(&["reserve", "--file", path.to_str().unwrap()]);
    let builtin = json(&["reserve", "--dataset", "taylor_ashe"]);
    assert_eq!(from_file["estimates"]["reserve"], builtin["estimates"]["reserve"]);
    assert_eq!(from_file["estimates"]["label"], "ta");
}

#[test]
fn config_errors_exit_with_2() {
    for args in [
        &["bootstrap", "--dataset", "taylor_ashe", "--sims", "0"][..],
        &["bootstrap", "--dataset", "foo"],
        &["bootstrap", "--dataset", "taylor_ashe", "--emit-samples"],
        &["bootstrap", "--dataset", "taylor_ashe", "--threads", "0"],
        &["bootstrap", "--dataset", "taylor_ashe", "--probs", "0.5,1.5"],
        &["bootstrap", "--dataset", "taylor_ashe", "--method", "euler"],
        &["reserve"],
        &["reserve", "--dataset", "mortgage", "--file", "x.csv"],
    ] {
        let out = ctreserve(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn bootstrap_ct_taylor_ashe() {
    let v = json(&[
        "bootstrap", "--method", "ct", "--dataset", "taylor_ashe", "--sims", "100000", "--seed", "42",
    ]);
    let row = &v["summary"][0];
    assert_eq!(row["method"], "ct_bootstrap");
    assert_eq!(row["count"], 100_000);
    let pct = row["msep_pct"].as_f64().unwrap();
    assert!((pct - 13.1039).abs() < 0.5, "{pct}");
    let probs: Vec<f64> =
        row["quantiles"].as_array().unwrap().iter().map(|q| q["p"].as_f64().unwrap()).collect();
    assert_eq!(probs, [0.5, 0.75, 0.95, 0.995]);
    let h = &v["histogram"][0];
    assert_eq!(h["counts"].as_array().unwrap().len(), 100);
    let total: u64 = h["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 100_000);
    assert_eq!(v["manifest"]["configs"][0]["method"], "continuous_time");
    assert_eq!(v["manifest"]["seed"], 42);
}

#[test]
fn samples_files_are_reproducible() {
    let run = |dir: &std::path::Path, threads: &str| {
        let out = ctreserve(&[
            "bootstrap", "--dataset", "mortgage", "--method", "mack", "--sims", "20000", "--seed", "7",
            "--threads", threads, "--out", dir.to_str().unwrap(), "--emit-samples",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        fs::read(dir.join("samples_mack.bin")).unwrap()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run(a.path(), "1");
    let second = run(b.path(), "3");
    assert_eq!(first.len(), 20_000 * 8);
    assert_eq!(first, second);

    let report: Value = serde_json::from_slice(&fs::read(a.path().join("report.json")).unwrap()).unwrap();
    let samples = ctreserve::report::samples_from_bytes(&first);
    assert_eq!(report["manifest"]["samples"][0]["sha256"], samples_sha256(&samples));
    assert!(a.path().join("summary.csv").exists());
    let hist = fs::read_to_string(a.path().join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 101);
}

#[test]
fn manifest_config_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = ctreserve(&[
        "bootstrap", "--dataset", "taylor_ashe", "--method", "ts", "--ts-mode", "resample",
        "--neg-policy", "drop", "--sims", "5000", "--seed", "11", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let m = &report["manifest"];
    let cfg = &m["configs"][0];
    assert_eq!(cfg["ts_param_mode"], "resample");
    assert_eq!(cfg["neg_policy"], "drop_replicate");
    let sims = cfg["replicates"].to_string();
    let seed = cfg["seed"].to_string();
    let again = json(&[
        "bootstrap", "--dataset", m["source"]["dataset"].as_str().unwrap(), "--method", "ts",
        "--ts-mode", "resample", "--neg-policy", "drop", "--sims", &sims, "--seed", &seed,
    ]);
    assert_eq!(again["manifest"]["samples"], m["samples"]);
}

#[test]
fn compare_outputs() {
    let v = json(&["compare", "--dataset", "mortgage", "--sims", "3000", "--seed", "1"]);
    let names: Vec<&str> =
        v["summary"].as_array().unwrap().iter().map(|r| r["method"].as_str().unwrap()).collect();
    assert_eq!(names, ["mack_lognormal", "mack_bootstrap", "ts_bootstrap", "ct_bootstrap"]);
    let edges: Vec<&Value> = v["histogram"].as_array().unwrap().iter().map(|h| &h["edges"]).collect();
    assert_eq!(edges.len(), 3);
    assert!(edges.iter().all(|e| *e == edges[0]));
    assert_eq!(v["manifest"]["configs"].as_array().unwrap().len(), 3);
    assert_eq!(v["diagnostics"]["simulation"].as_array().unwrap().len(), 3);
    let sub = v["diagnostics"]["zero_mass"]["substitute"]["prob"].as_f64().unwrap();
    assert!((sub - 0.03184).abs() < 5e-4);

    let out = ctreserve(&["compare", "--dataset", "taylor_ashe", "--sims", "2000", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("statistic,method,value"));
    assert!(lines.all(|l| l.split(',').count() == 3));
    assert!(text.contains("msep_pct,ct_bootstrap,"));
    assert!(text.contains("q995_excess_pct,mack_gamma,"));
}
