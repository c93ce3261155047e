use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn iwk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwk")).args(args).env_remove("IWK_CONFIG").output().expect("iwk runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("iwk-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn zeta_default_cell_matches_bernoulli() {
    let out = iwk(&["zeta", "--p", "5", "--c", "2", "--j", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "zeta");
    assert_eq!(v["result"]["oracle"], "-1");
    assert_eq!(v["result"]["match"], true);
    assert_eq!(v["summary"]["fail"], 0);
}

#[test]
fn report_schema() {
    let v = json(&iwk(&["zeta"]));
    for key in ["p", "prec", "deg", "tdeg", "level", "seed", "format"] {
        assert!(v["config"].get(key).is_some(), "config.{key}");
    }
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        for key in ["id", "paper_anchor", "status", "lhs", "rhs", "precision_attained"] {
            assert!(c.get(key).is_some(), "check.{key}");
        }
        assert!(c["status"] == "pass" || c["status"] == "fail");
    }
    let pass = checks.iter().filter(|c| c["status"] == "pass").count() as u64;
    assert_eq!(v["summary"]["pass"].as_u64(), Some(pass));
    let ids: Vec<&str> = checks.iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn gauss_sum_square_at_three() {
    let out = iwk(&["gauss", "--p", "3", "--level", "1", "--tame", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["tau_squared"], "(3^1*-1 + O(3^30))*xi^0");
}

#[test]
fn eps_regulator_theta_pass() {
    for args in [
        &["eps", "--j", "2", "--weights", "0,1,-2"][..],
        &["regulator", "--c", "3"][..],
        &["theta", "--r", "-1"][..],
        &["theta", "--r", "2"][..],
    ] {
        let out = iwk(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(iwk(&["zeta", "--p", "4"]).status.code(), Some(2));
    assert_eq!(iwk(&["zeta", "--bogus"]).status.code(), Some(2));
    assert_eq!(iwk(&["zeta", "--c", "5"]).status.code(), Some(2));
    assert_eq!(iwk(&["zeta", "--prec", "2"]).status.code(), Some(2));
}

#[test]
fn config_file_then_flags() {
    let path = temp_file("cfg.json", r#"{"p": 7, "prec": 20, "format": "text"}"#);
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_iwk")).args(args).env("IWK_CONFIG", &path).output().unwrap()
    };
    let text = String::from_utf8(run(&["zeta"]).stdout).unwrap();
    assert!(text.starts_with("zeta p=7 N=20 "), "{text}");
    let over = json(&run(&["zeta", "--p", "3", "--format", "json"]));
    assert_eq!(over["config"]["p"], 3);
    assert_eq!(over["config"]["prec"], 20);
    let bad = temp_file("bad.json", r#"{"prime": 7}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_iwk")).arg("zeta").env("IWK_CONFIG", &bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(path).ok();
    std::fs::remove_file(bad).ok();
}

#[test]
fn suite_is_deterministic_across_jobs() {
    let base = ["suite", "--p", "3", "--prec", "12", "--deg", "16", "--tdeg", "8", "--level", "2", "--seed", "7"];
    let one = iwk(&base);
    let mut four_args = base.to_vec();
    four_args.extend(["--jobs", "4"]);
    let four = iwk(&four_args);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, iwk(&base).stdout);
    let v = json(&one);
    assert_eq!(v["command"], "suite");
    assert!(v.get("result").is_none());
    assert!(v["summary"]["pass"].as_u64().unwrap() > 0);
}
