use std::fs;
use std::path::Path;

use heisenberg_spherical::cli::{main_with_args, ExperimentConfig, Subcommand};
use serde_json::Value;

fn run_cli(sub: &str, config: Option<&ExperimentConfig>, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec!["hspher".to_string(), sub.to_string(), "--out".into(), out.display().to_string()];
    if let Some(c) = config {
        let path = out.with_extension("json");
        fs::write(&path, c.to_json()).unwrap();
        args.push("--config".into());
        args.push(path.display().to_string());
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    main_with_args(args)
}

fn records(out: &Path) -> Vec<Value> {
    fs::read_to_string(out.join("records.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn nonpositive_lambda_min_is_reported_by_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad");
    let mut c = ExperimentConfig::default_for(Subcommand::Transform);
    c.fan_grid.lambda_min = 0.0;
    assert_ne!(run_cli("transform", Some(&c), &out, &[]), 0);
    let err: Value = serde_json::from_str(&fs::read_to_string(out.join("error.json")).unwrap()).unwrap();
    assert_eq!(err["field"], "fan_grid.lambda_min");
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad");
    let path = dir.path().join("c.json");
    let mut v: Value = serde_json::from_str(&ExperimentConfig::default_for(Subcommand::Plancherel).to_json()).unwrap();
    v["lambda_step"] = 0.1.into();
    fs::write(&path, v.to_string()).unwrap();
    let code = main_with_args(["hspher", "plancherel", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.join("error.json").exists());
}

#[test]
fn artifacts_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::default_for(Subcommand::EvalSpherical);
    c.eval.get_or_insert_with(Default::default).random_fan_points = 50;
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run_cli("eval-spherical", Some(&c), &a, &["--threads", "1", "--seed", "7"]), 0);
    assert_eq!(run_cli("eval-spherical", Some(&c), &b, &["--threads", "3", "--seed", "7"]), 0);
    for name in ["manifest.json", "config.json", "table.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let other = dir.path().join("c");
    assert_eq!(run_cli("eval-spherical", Some(&c), &other, &["--seed", "8"]), 0);
    assert_ne!(fs::read(a.join("table.csv")).unwrap(), fs::read(other.join("table.csv")).unwrap());
}

#[test]
fn manifest_records_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    assert_eq!(run_cli("plancherel", None, &out, &[]), 0);
    let m: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let c = ExperimentConfig::from_json(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(m["config_sha256"], c.hash());
    assert_eq!(m["subcommand"], "plancherel");
    assert_eq!(m["schema_version"], 1);
}

#[test]
fn plancherel_default_is_tight() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    assert_eq!(run_cli("plancherel", None, &out, &[]), 0);
    let defect = records(&out)[0]["defect"].as_f64().unwrap();
    assert!(defect <= 1e-6, "defect {defect}");
}

#[test]
fn pw_inverse_default_recovers_spectral_radius() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pwi");
    assert_eq!(run_cli("pw-inverse", None, &out, &[]), 0);
    let c = ExperimentConfig::default_for(Subcommand::PwInverse);
    let grid = c.build_fan_grid().unwrap();
    let target = c.fan_function.as_ref().unwrap().spectral_radius(&grid);
    let limit = records(&out)[0]["extrapolated_limit"].as_f64().unwrap();
    assert!((limit / target - 1.0).abs() < 0.05, "limit {limit}, target {target}");
}

#[test]
fn inverse_output_feeds_plancherel() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("inv");
    assert_eq!(run_cli("inverse", None, &first, &[]), 0);
    let mut c = ExperimentConfig::default_for(Subcommand::Plancherel);
    c.test_function = None;
    c.fan_function = None;
    c.input = Some(first.join("function.csv"));
    let second = dir.path().join("pl");
    assert_eq!(run_cli("plancherel", Some(&c), &second, &[]), 0);
    assert!(records(&second)[0]["defect"].as_f64().unwrap() < 1e-6);
}
