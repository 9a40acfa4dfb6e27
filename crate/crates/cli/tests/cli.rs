//! End-to-end runs of the `spinbath` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use spinbath_cli::parse_config;

fn spinbath(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinbath"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("SPINBATH_THREADS")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn error_record(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().rev().find(|l| l.starts_with('{')).expect("json record on stderr");
    serde_json::from_str(line).unwrap()
}

const FOUR_MODES: &str = r#"{
    "model": {"delta": 0.8, "beta": 0.5, "sampler": {"count": 4, "omega": 1.0}},
    "grid": {"t_max": 10, "steps": 40},
    "seed": 4
}"#;

#[test]
fn single_point_run_writes_two_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"model": {"delta": 1.0}, "grid": {"times": [0]}}"#);
    let out = spinbath(tmp.path(), &["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("simulate.csv")).unwrap();
    assert_eq!(
        csv,
        "t,sz_configsum,re_rho10_configsum,im_rho10_configsum\n\
         0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0\n"
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", FOUR_MODES);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let args = ["simulate", "--config", &cfg, "--engines", "configsum,integral"];
    assert!(spinbath(&a, &args).status.success());
    assert!(spinbath(&b, &args).status.success());
    let ca = std::fs::read(a.join("simulate.csv")).unwrap();
    assert_eq!(ca, std::fs::read(b.join("simulate.csv")).unwrap());
    assert_eq!(String::from_utf8(ca).unwrap().lines().count(), 42);
}

#[test]
fn summary_embeds_a_reproducible_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", FOUR_MODES);
    let first = tmp.path().join("first");
    let out = spinbath(&first, &["compare", "--config", &cfg, "--engines", "oracle,configsum", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = read_json(&first.join("compare.json"));
    assert_eq!(summary["seed"], 9);
    assert!(summary["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
    assert_eq!(summary["fingerprint"].as_str().unwrap().len(), 16);
    assert_eq!(summary["pairs"][0]["pass"], true);

    let embedded = summary["config"].to_string();
    let parsed = parse_config(&embedded).unwrap();
    assert_eq!(parsed.seed, 9);
    let again = write_config(tmp.path(), "again.json", &embedded);
    let second = tmp.path().join("second");
    assert!(spinbath(&second, &["compare", "--config", &again]).status.success());
    assert_eq!(
        std::fs::read(first.join("compare.csv")).unwrap(),
        std::fs::read(second.join("compare.csv")).unwrap()
    );
}

#[test]
fn compare_gates() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", FOUR_MODES);
    let ok = spinbath(tmp.path(), &["compare", "--config", &cfg, "--engines", "configsum,integral"]);
    assert_eq!(ok.status.code(), Some(0));
    let summary = read_json(&tmp.path().join("compare.json"));
    assert!(summary["pairs"][0]["max_sz_deviation"].as_f64().unwrap() <= 1e-6);
    let ratio = &summary["printed_to_reconciled_re_ratio"][0];
    assert!((ratio["min"].as_f64().unwrap() - 2.0).abs() < 1e-9);

    let loose = spinbath(
        tmp.path(),
        &["compare", "--config", &cfg, "--engines", "configsum,integral", "--quad-abs-tol", "1e-2"],
    );
    assert_eq!(loose.status.code(), Some(1));
    assert_eq!(read_json(&tmp.path().join("compare.json"))["pass"], false);
}

#[test]
fn configuration_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let no_delta = write_config(tmp.path(), "a.json", r#"{"model": {"beta": 1.0}}"#);
    let out = spinbath(tmp.path(), &["simulate", "--config", &no_delta]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_record(&out)["error"]["message"].as_str().unwrap().contains("delta"));

    let big = write_config(tmp.path(), "b.json", r#"{"model": {"delta": 1.0, "sampler": {"count": 16}}}"#);
    let out = spinbath(tmp.path(), &["compare", "--config", &big, "--engines", "oracle,configsum"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"]["field"], "engines");

    let out = spinbath(tmp.path(), &["simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = spinbath(tmp.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = spinbath(tmp.path(), &["simulate", "--config", &big, "--engines", "magic"]);
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_spinbath"))
        .args(["identity-check", "--out-dir"])
        .arg(tmp.path())
        .env("SPINBATH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn engine_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"model": {"delta": 1.0, "initial_state": "ground"}, "engines": ["integral"]}"#,
    );
    let out = spinbath(tmp.path(), &["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_record(&out)["error"]["kind"], "engine");
}

#[test]
fn stationary_reports_sign_flip_and_canonical_gap() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"model": {"delta": 1.0, "beta": 2.0, "sampler": {"count": 6, "c_total": 0.8}}, "seed": 3,
            "stationary": {"t_start": 50, "t_end": 150, "samples": 2000}}"#,
    );
    let out = spinbath(tmp.path(), &["stationary", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let r = &read_json(&tmp.path().join("stationary.json"))["report"];
    let up = r["excited"]["sz"].as_f64().unwrap();
    let down = r["ground"]["sz"].as_f64().unwrap();
    assert!(up > 0.2 && (up + down).abs() < 1e-12);
    assert!((r["canonical_sz"].as_f64().unwrap() + 2f64.tanh()).abs() < 1e-15);
    assert_eq!(r["differs_from_canonical"], true);
    assert_eq!(r["window"][0], 50.0);

    let decoupled = write_config(tmp.path(), "d.json", r#"{"model": {"delta": 1.0, "sampler": {"count": 3, "c_total": 0}}}"#);
    assert!(spinbath(tmp.path(), &["stationary", "--config", &decoupled]).status.success());
    let r = &read_json(&tmp.path().join("stationary.json"))["report"];
    assert_eq!(r["excited"]["sz"], 1.0);
    assert_eq!(r["printed_value"], Value::Null);
}

#[test]
fn identity_check_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spinbath(tmp.path(), &["identity-check"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("identity.csv")).unwrap();
    assert_eq!(csv.lines().count(), 126);
    assert_eq!(csv.lines().next(), Some("delta,omega,eta,residual"));
    assert_eq!(read_json(&tmp.path().join("identity.json"))["pass"], true);
}

#[test]
fn sweep_covers_the_cartesian_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"model": {"delta": 1.0, "sampler": {"count": 8}}, "seed": 2,
            "stationary": {"samples": 500},
            "sweep": {"delta": [0.5, 1.5], "beta": [0, 1]}}"#,
    );
    let out = spinbath(tmp.path(), &["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("delta,c_total,beta,sigma2,z,printed,oracle,ratio"));
    let last: Vec<f64> = rows[4].split(',').take(3).map(|c| c.parse().unwrap()).collect();
    assert_eq!(last, vec![1.5, 1.0, 1.0]);
}
