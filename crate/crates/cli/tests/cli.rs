//! End-to-end runs of the `bimodal` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn bimodal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bimodal")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV table, header block and column line removed.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn protocol_prints_amplitudes_and_header() {
    let out = bimodal(&["protocol", "ghz3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for key in ["# tool: ", "# config: ", "# seed: 1", "# units: ", "# fidelity: ", "# ideal_time: "] {
        assert!(text.contains(key), "missing {key}");
    }
    let amps = rows(&text);
    assert_eq!(amps.len(), 8);
    for r in amps {
        let (re, im): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!((re.hypot(im) - 0.125f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn bell_modes_at_the_resonance_window() {
    let out = bimodal(&["protocol", "bell-modes", "--delta-over-omega", "1.41421356", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["header"]["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(v["columns"], serde_json::json!(["label", "re", "im"]));
}

#[test]
fn input_errors_exit_with_two() {
    let infeasible = bimodal(&["protocol", "w3-hybrid", "--delta-over-omega", "5"]);
    assert_eq!(infeasible.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&infeasible.stderr).contains("2.732050807568877"));
    assert_eq!(bimodal(&["protocol", "w9-hybrid"]).status.code(), Some(2));
    assert_eq!(bimodal(&["sweep", "dissipation", "--grid-step", "0"]).status.code(), Some(2));
    assert_eq!(bimodal(&["sweep", "nonsense"]).status.code(), Some(2));
    assert_eq!(bimodal(&["positions", "--sign", "sideways"]).status.code(), Some(2));
    assert_eq!(bimodal(&["oracle", "quartic"]).status.code(), Some(2));
    assert_eq!(bimodal(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_out_path() {
    let dir = std::env::temp_dir().join(format!("bimodal-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 2, "sign": "opposite"}"#).unwrap();
    let out_path = dir.join("roots.csv");
    let out = bimodal(&["positions", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let table = rows(&text);
    assert!(!table.is_empty());
    for r in &table {
        assert_eq!((r[0].as_str(), r[1].as_str()), ("2", "opposite"));
        assert!(r[3].parse::<f64>().unwrap().abs() <= 1e-12);
    }
    std::fs::write(&cfg, r#"{"n": 2, "colour": "red"}"#).unwrap();
    assert_eq!(bimodal(&["positions", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn sweeps_emit_the_documented_columns() {
    let cases: [(&[&str], &str); 3] = [
        (
            &["sweep", "dissipation", "--chi-max", "0.02", "--protocols", "bell-modes", "--scenario", "equal"],
            "chi_over_unit,scenario,protocol,fidelity",
        ),
        (&["sweep", "jitter", "--reps", "50", "--sigma-pct", "0,5"], "sigma_pct,protocol,mean_fidelity,stderr,reps,seed"),
        (
            &["sweep", "sasa", "--reps", "20", "--grid-step", "0.5", "--sigma-pct", "0"],
            "gamma_over_lambda,jitter_pct,mean_B,stderr,reps,seed,threshold_gamma_star",
        ),
    ];
    for (args, header) in cases {
        let out = bimodal(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let text = stdout(&out);
        assert_eq!(text.lines().find(|l| !l.starts_with('#')), Some(header));
        assert!(!text.contains('\r'));
    }
}

#[test]
fn oracle_reports_each_family() {
    let out = bimodal(&["oracle", "single", "--draws", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&stdout(&out));
    assert_eq!(table.len(), 1);
    assert_eq!(table[0][0], "single");
    assert_eq!(table[0][4], "true");
}
