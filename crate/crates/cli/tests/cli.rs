use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mogp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mogp")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mogp-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn listing(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    v.sort();
    v
}

#[test]
fn seed_is_required() {
    let dir = scratch("noseed");
    let out = mogp(&["max-weight", "--replicates", "10", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    assert!(listing(&dir).is_empty());
}

#[test]
fn verify_passes_on_bundled_models() {
    let dir = scratch("verify");
    let out = mogp(&["verify", "--seed", "1", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(listing(&dir), ["manifest.json", "report.json", "verify.csv"]);
    let csv = fs::read_to_string(dir.join("verify.csv")).unwrap();
    assert!(csv.starts_with("suite,label,value,target,tolerance,pass\n"));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["command"], "verify");
    assert_eq!(manifest["failed_checks"], 0);
}

#[test]
fn config_file_supplies_seed_and_flags_override() {
    let dir = scratch("config");
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, r#"{"seed": 5, "replicates": 20, "widths": [10, 50]}"#).unwrap();
    let a = dir.join("a");
    let out = mogp(&["max-weight", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["replicates"], 20);
    assert_eq!(manifest["config"]["widths"], serde_json::json!([10, 50]));
    let b = dir.join("b");
    let out = mogp(&["max-weight", "--config", cfg.to_str().unwrap(), "--seed", "6", "--out", b.to_str().unwrap()]);
    assert!(out.status.success());
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 6);
}

#[test]
fn bad_configs_are_rejected() {
    let dir = scratch("badcfg");
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, r#"{"widths": [10], "colour": "red"}"#).unwrap();
    let out = mogp(&["max-weight", "--seed", "1", "--config", cfg.to_str().unwrap(), "--out", dir.join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = mogp(&["run", "nonsense", "--seed", "1", "--out", dir.join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = mogp(&["max-weight", "--seed", "1", "--workers", "0", "--out", dir.join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_format_and_worker_invariance() {
    let dir = scratch("json");
    let args = |out: &Path, workers: &str| {
        mogp(&["output-corr", "--seed", "3", "--replicates", "60", "--workers", workers, "--format", "json", "--out", out.to_str().unwrap()])
    };
    assert!(args(&dir.join("w1"), "1").status.success());
    assert!(args(&dir.join("w8"), "8").status.success());
    assert_eq!(listing(&dir.join("w1")), ["manifest.json", "output_corr.json"]);
    for f in ["manifest.json", "output_corr.json"] {
        assert_eq!(fs::read(dir.join("w1").join(f)).unwrap(), fs::read(dir.join("w8").join(f)).unwrap(), "{f}");
    }
    let body: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("w1/output_corr.json")).unwrap()).unwrap();
    assert_eq!(body["report"]["master_seed"], 3);
    assert!(body["tables"][0]["rows"].as_array().unwrap().len() > 0);
}

#[test]
fn help_lists_csv_schemas() {
    let out = mogp(&["truncation-error", "--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("alpha,eps,layer,error,error_se,bound"));
    assert!(mogp(&["--version"]).status.success());
}
