use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mhtext(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhtext"))
        .args(args)
        .env("MHTEXT_OUTPUT_ROOT", root)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Synthetic corpus plus a prepared experiment under `root/prep`.
fn prepared(root: &Path) -> String {
    let o = mhtext(root, &["synth", "--out", "corpus.csv", "--n-docs", "400", "--seed", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = root.join("corpus.csv");
    let o = mhtext(root, &["prepare", "--input", csv.to_str().unwrap(), "--scheme", "binary", "--seed", "9", "--out", "prep"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    root.join("prep/experiment.json").to_str().unwrap().to_string()
}

#[test]
fn prepare_writes_manifest_and_distribution() {
    let dir = tempfile::tempdir().unwrap();
    prepared(dir.path());
    for f in ["experiment.json", "split.json", "distribution.csv", "distribution.svg"] {
        assert!(dir.path().join("prep").join(f).is_file(), "{f}");
    }
    let csv = fs::read_to_string(dir.path().join("prep/distribution.csv")).unwrap();
    assert!(csv.starts_with("name,count,proportion,percent\n"));
}

#[test]
fn tune_is_byte_reproducible_under_fixed_clock() {
    let dir = tempfile::tempdir().unwrap();
    let config = prepared(dir.path());
    for out in ["a", "b"] {
        let o = mhtext(dir.path(), &["tune", "--config", &config, "--model", "logistic", "--out", out, "--set", "fixed_clock=true"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["result.json", "model.json", "report.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical runs");
    }
}

#[test]
fn train_evaluate_report_chain() {
    let dir = tempfile::tempdir().unwrap();
    let config = prepared(dir.path());
    let o = mhtext(dir.path(), &["train", "--config", &config, "--model", "gbdt", "--preset", "--out", "g"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let model = dir.path().join("g/model.json");
    let o = mhtext(dir.path(), &["evaluate", "--model", model.to_str().unwrap(), "--split", "test", "--out", "ev"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ev: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("ev/evaluation_test.json")).unwrap()).unwrap();
    let result: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("g/result.json")).unwrap()).unwrap();
    assert_eq!(ev["weighted_f1"], result["test"]["weighted_f1"]);

    let res = dir.path().join("g/result.json");
    for (fmt, file) in [("json", "report.json"), ("csv", "roc.csv"), ("svg", "distribution.svg")] {
        let o = mhtext(dir.path(), &["report", "--result", res.to_str().unwrap(), "--format", fmt, "--out", "r"]);
        assert_eq!(code(&o), 0);
        assert!(dir.path().join("r").join(file).is_file(), "{file}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let config = prepared(dir.path());

    // Usage errors.
    assert_eq!(code(&mhtext(dir.path(), &["tune", "--config", &config, "--model", "xgboost"])), 1);
    assert_eq!(code(&mhtext(dir.path(), &["report", "--result", "r.json", "--format", "pdf"])), 1);
    assert_eq!(code(&mhtext(dir.path(), &["train", "--config", &config, "--model", "rf"])), 1);
    assert_eq!(code(&mhtext(dir.path(), &["tune", "--config", &config, "--model", "rf", "--set", "no_such_key=1"])), 1);
    assert_eq!(code(&mhtext(dir.path(), &["--help"])), 0);

    // Data errors.
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "id,text\n1,hello\n").unwrap();
    assert_eq!(code(&mhtext(dir.path(), &["prepare", "--input", bad.to_str().unwrap(), "--scheme", "binary", "--out", "p"])), 2);
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&mhtext(dir.path(), &["prepare", "--input", missing.to_str().unwrap(), "--scheme", "binary", "--out", "p"])), 2);
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{not json").unwrap();
    assert_eq!(code(&mhtext(dir.path(), &["evaluate", "--model", junk.to_str().unwrap()])), 2);

    // Every trial failing.
    let params = dir.path().join("p.json");
    fs::write(&params, r#"{"C": -1}"#).unwrap();
    let o = mhtext(dir.path(), &["train", "--config", &config, "--model", "logistic", "--params", params.to_str().unwrap(), "--out", "f"]);
    assert_eq!(code(&o), 3);
    let result: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("f/result.json")).unwrap()).unwrap();
    assert_eq!(result["status"], "no_successful_trials");
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("f/report.json")).unwrap()).unwrap();
    assert_eq!(report["message"], "no successful trials");
}
