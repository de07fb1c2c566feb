use std::process::{Command, Output};

fn qnd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnd")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_sweep_emits_header_and_rows() {
    let text = stdout(&qnd(&["sweep", "--exact", "--observable", "VB", "--phi-steps", "5"]));
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("phi,theta,lambda,observable,theory,qnd_estimate"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.contains(",VB,") && r.contains("4.71238898038469")));
}

#[test]
fn json_output_carries_config_and_fits() {
    let text = stdout(&qnd(&["sweep", "--exact", "--phi-steps", "4", "--seed", "99", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["config"]["master_seed"], 99);
    assert_eq!(v["config"]["observable"], "C2");
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
    assert_eq!(v["fits"][0]["kind"], "scale");
    assert!((v["fits"][0]["parameter"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"observable": "PA", "exact_mode": true, "phi_count": 3}"#).unwrap();
    let text = stdout(&qnd(&["sweep", "--config", cfg.to_str().unwrap(), "--phi-steps", "2"]));
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains(",PA,"));
}

#[test]
fn criteria_reads_full_protocol_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fp.csv");
    let o = qnd(&["full-protocol", "--exact", "--phi-steps", "4", "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("equal weight per observable"));
    let report: serde_json::Value =
        serde_json::from_str(&stdout(&qnd(&["criteria", "--input", csv.to_str().unwrap()]))).unwrap();
    let rows = report["per_observable"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["e_qnd"].as_f64().unwrap() < 1e-8));
}

#[test]
fn repeat_runs_requested_repetitions() {
    let text = stdout(&qnd(&["repeat", "--repetitions", "3", "--shots", "200", "--observable", "C1"]));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn identity_check_passes() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&qnd(&["check-appendix-a"]))).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn amplitudes_list_every_outcome() {
    let text = stdout(&qnd(&["amplitudes", "--observable", "VA", "--phi-steps", "3"]));
    assert_eq!(text.lines().next().unwrap(), "phi,branch,probability,reliable");
    assert_eq!(text.lines().count(), 1 + 3 * 4);
}

#[test]
fn invalid_input_exits_nonzero() {
    for args in [
        &["sweep", "--shots", "0"][..],
        &["sweep", "--observable", "C3"],
        &["sweep", "--noise-2q", "1.5"],
        &["sweep", "--threads", "0", "--exact"],
        &["criteria", "--input", "/nonexistent.csv"],
    ] {
        let o = qnd(args);
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
