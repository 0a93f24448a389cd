use std::path::{Path, PathBuf};
use std::process::Command;

use imcf_core::scenario::{self, exit, RunOptions, CSV_HEADER};
use serde_json::Value;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

fn imcf(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_imcf")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_meta(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("run_meta");
    v
}

#[test]
fn sphere_run_writes_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("scenarios/schwarzschild_sphere.toml");
    let (code, stdout, _) = imcf(&["flow", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, exit::PASS, "{stdout}");

    let csv = std::fs::read_to_string(dir.path().join("schwarzschild_sphere.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 32);
    for line in &lines[1..] {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 8);
        assert!((cols[3] - 7.0898154036220635).abs() < 1e-12, "Q column: {line}");
        assert!(cols[4].abs() < 1e-12, "deficit column: {line}");
        assert!((cols[5] - 1.0).abs() < 1e-12, "hawking column: {line}");
    }

    let json = read_json(&dir.path().join("schwarzschild_sphere.json"));
    assert_eq!(json["limit_target"].as_f64().unwrap(), 4.0 * std::f64::consts::PI.sqrt());
    assert_eq!(json["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(json["verdicts"]["monotone"]["pass"], true);
    assert_eq!(json["verdicts"]["monotone"]["tolerance_key"], "analysis.eps_mono");
    assert_eq!(json["config"]["surface"]["r0"], 4.0);
    assert_eq!(json["outer_minimizing"], "sphere");
    assert!(json["run_meta"]["elapsed_ms"].is_number());
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = scenario::load_config(&fixture("scenarios/perturbed_sphere.toml")).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = scenario::run_scenario(&cfg, RunOptions::default()).unwrap();
    let second = scenario::run_scenario(&cfg, RunOptions::default()).unwrap();
    let (pa, ja) = scenario::emit_outputs(&first, a.path()).unwrap();
    let (pb, jb) = scenario::emit_outputs(&second, b.path()).unwrap();
    assert_eq!(std::fs::read(&pa.csv).unwrap(), std::fs::read(&pb.csv).unwrap());
    assert_eq!(without_meta(ja), without_meta(jb));
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = |rel: &str| imcf(&["flow", "--config", fixture(rel).to_str().unwrap(), "--out", out]);

    let (code, _, stderr) = run("failing/parse_error.toml");
    assert_eq!(code, exit::PARSE);
    assert!(stderr.contains("colour"), "{stderr}");

    let (code, _, stderr) = run("failing/inside_horizon.toml");
    assert_eq!(code, exit::VALIDATION);
    assert!(stderr.contains("surface inside horizon (r_h=2)"), "{stderr}");

    let (code, _, _) = run("failing/monotonicity_violation.toml");
    assert_eq!(code, exit::MONOTONICITY);

    let (code, _, _) = run("failing/does_not_exist.toml");
    assert_eq!(code, exit::IO);

    let (code, _, _) = imcf(&["flow"]);
    assert_eq!(code, exit::PARSE);
}

#[test]
fn strict_mode_promotes_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short_tail.toml");
    let text = std::fs::read_to_string(fixture("scenarios/schwarzschild_sphere.toml")).unwrap();
    std::fs::write(&cfg, format!("{}\n[analysis]\ntail_samples = 5\n", text.replace("schwarzschild_sphere", "short_tail")))
        .unwrap();
    let args = |strict: bool| {
        let mut v = vec!["flow", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()];
        if strict {
            v.push("--strict");
        }
        v.into_iter().map(String::from).collect::<Vec<_>>()
    };
    let run = |a: Vec<String>| imcf(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let (code, _, stderr) = run(args(false));
    assert_eq!(code, exit::PASS);
    assert!(stderr.contains("tail fit rejected"), "{stderr}");
    assert_eq!(run(args(true)).0, exit::OTHER_VERDICT);
}

#[test]
fn negative_control_is_flagged() {
    let cfg = scenario::load_config(&fixture("scenarios/negative_control.toml")).unwrap();
    let report = scenario::run_scenario(&cfg, RunOptions::default()).unwrap();
    assert_eq!(report.exit_code, exit::MONOTONICITY);
    assert!(!report.verdicts.monotone.pass);
    assert!(!report.verdicts.staticity.pass);
    assert!(report.diagnostics.max_static_residual > 1e-3);
    assert!(report.warnings.iter().any(|w| w.contains("flux")));
}

#[test]
fn flat_spheroid_has_positive_deficit() {
    let cfg = scenario::load_config(&fixture("scenarios/flat_spheroid.toml")).unwrap();
    let report = scenario::run_scenario(&cfg, RunOptions::default()).unwrap();
    assert!(report.verdicts.monotone.pass);
    assert!(report.verdicts.deficit.initial > 0.07);
    assert_eq!(report.outer_minimizing, "assumed");
    assert_eq!(report.exit_code, exit::PASS);
}

#[test]
fn sweep_aggregates_individual_summaries() {
    let src = tempfile::tempdir().unwrap();
    for name in ["schwarzschild_sphere", "negative_control", "schwarzschild_5d_sphere"] {
        std::fs::copy(fixture(&format!("scenarios/{name}.toml")), src.path().join(format!("{name}.toml"))).unwrap();
    }
    std::fs::copy(fixture("failing/parse_error.toml"), src.path().join("parse_error.toml")).unwrap();
    let out = tempfile::tempdir().unwrap();
    let (code, stdout, _) = imcf(&[
        "sweep",
        "--config",
        src.path().to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--jobs",
        "3",
    ]);
    assert_eq!(code, exit::MONOTONICITY, "{stdout}");

    let aggregate = read_json(&out.path().join("sweep_summary.json"));
    let scenarios = aggregate["scenarios"].as_object().unwrap();
    assert_eq!(scenarios.len(), 4);
    for name in ["schwarzschild_sphere", "negative_control", "schwarzschild_5d_sphere"] {
        let individual = read_json(&out.path().join(format!("{name}.json")));
        assert_eq!(scenarios[name], individual, "{name}");
    }
    assert_eq!(scenarios["parse_error"]["exit_code"], exit::PARSE);
}

#[test]
fn static_check_reports_diagnostics() {
    let (code, stdout, _) = imcf(&["static-check", "--config", fixture("scenarios/schwarzschild_5d_sphere.toml").to_str().unwrap()]);
    assert_eq!(code, exit::PASS);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["diagnostics"]["max_static_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["masses"]["adm_mass"], 0.5);

    let (code, _, _) = imcf(&["static-check", "--config", fixture("scenarios/negative_control.toml").to_str().unwrap()]);
    assert_eq!(code, exit::OTHER_VERDICT);
}

#[test]
fn oracle_prints_reference_table() {
    let (code, stdout, _) = imcf(&["oracle"]);
    assert_eq!(code, exit::PASS);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["dimensions"].as_array().unwrap().len(), 5);
    let prolate = &v["spheroids"][0];
    assert!((prolate["minkowski_deficit"].as_f64().unwrap() - 0.07280940061681607).abs() < 1e-13);
}
