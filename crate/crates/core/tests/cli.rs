use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn amm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amm")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn uniswap_spec(dir: &Path) -> String {
    write_spec(
        dir,
        "uni.json",
        r#"{"n":2,"representation":"potential","family":"uniswap","params":{},"initial_reserves":[4,9]}"#,
    )
}

#[test]
fn quote_valid_and_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let spec = uniswap_spec(dir.path());
    let out = amm(&["quote", "--spec", &spec, "--bundle", "2,-3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["quote"]["post_reserves"], serde_json::json!([6.0, 6.0]));

    let out = amm(&["quote", "--spec", &spec, "--bundle=2,-2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["valid"], false);
    assert!(v["residual"].as_f64().unwrap() > 0.4);
    assert!(v["quote"].is_null());
}

#[test]
fn cost_market_cash_leg() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "lmsr.json",
        r#"{"n":2,"representation":"cost","family":"lmsr","params":{"b":1},"initial_reserves":[0,0]}"#,
    );
    let v = json(&amm(&["quote", "--spec", &spec, "--bundle=-1.5,-1.5"]));
    assert!((v["quote"]["cash_leg"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn convert_reports_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let spec = uniswap_spec(dir.path());
    let v = json(&amm(&["convert", "to-cost", "--spec", &spec]));
    assert!(v["agreement"]["max_abs_error"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["spec"]["family"], "from-potential:uniswap");
    let out = amm(&["convert", "to-perspective", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn score_examples() {
    let v = json(&amm(&["score", "--rule", "brier", "--report", "0.5,0.5", "--outcome", "1"]));
    assert!((v.as_f64().unwrap() - 0.5).abs() < 1e-12);
    let v = json(&amm(&["score", "--rule", "uniswap", "--param", "k=1", "--report", "0.8,0.2", "--outcome", "1"]));
    assert!((v.as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert_eq!(amm(&["score", "--rule", "brier", "--report", "0.5,0.5", "--outcome", "3"]).status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = uniswap_spec(dir.path());
    let out = amm(&["check", "--spec", &spec, "--trials", "50", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let again = amm(&["check", "--spec", &spec, "--trials", "50", "--seed", "3"]);
    assert_eq!(out.stdout, again.stdout);

    let brier = write_spec(
        dir.path(),
        "hybrid.json",
        r#"{"n":2,"representation":"potential","family":"perspective-of:brier","params":{},"initial_reserves":[1,1]}"#,
    );
    assert_eq!(amm(&["check", "--spec", &brier, "--trials", "200"]).status.code(), Some(1));
}

#[test]
fn trade_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let spec = uniswap_spec(dir.path());
    let log = dir.path().join("trades.jsonl");
    let log = log.to_str().unwrap();
    assert!(amm(&["trade", "--spec", &spec, "--bundle=2,-3", "--out", log]).status.success());
    assert!(amm(&["trade", "--spec", &spec, "--bundle=-1,1.2", "--out", log]).status.success());
    assert_eq!(std::fs::read_to_string(log).unwrap().lines().count(), 2);
    let v = json(&amm(&["replay", "--spec", &spec, "--log", log]));
    assert_eq!(v["trades"], 2);
    assert_eq!(v["reserves"], serde_json::json!([5.0, 7.2]));

    let bad = amm(&["trade", "--spec", &spec, "--bundle=1,1", "--out", log]);
    assert_eq!(bad.status.code(), Some(3));
    assert_eq!(std::fs::read_to_string(log).unwrap().lines().count(), 2);
}

#[test]
fn grid_domain_error_and_stdin_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = uniswap_spec(dir.path());
    assert_eq!(amm(&["grid", "--spec", &spec, "--x", "0,1,3"]).status.code(), Some(2));
    let out = amm(&["grid", "--spec", &spec, "--x", "1,4,4", "--y", "1,4,4"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("q1,q2,phi"));
    assert_eq!(csv.lines().count(), 17);
    assert!(csv.contains("4,4,4\n"));

    let mut child = Command::new(env!("CARGO_BIN_EXE_amm"))
        .args(["convert", "to-cost", "--spec", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(std::fs::read(&spec).unwrap().as_slice()).unwrap();
    assert!(child.wait_with_output().unwrap().status.success());
}

#[test]
fn malformed_spec_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.json", r#"{"n":2,"family":"uniswap"}"#);
    assert_eq!(amm(&["quote", "--spec", &spec, "--bundle", "1,1"]).status.code(), Some(3));
}
