use std::path::Path;
use std::process::{Command, Output};

fn z2spinor(dir: &Path, command: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_z2spinor"))
        .arg(command)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn usage_and_precondition_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = z2spinor(dir.path(), "iterate", r#"{"frame": {"s": 1.0}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("above the threshold"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());

    let o = z2spinor(dir.path(), "iterate", r#"{"frame": {"T": 8, "P": 3}}"#, &["--strict"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("is empty"), "{}", stderr(&o));

    let o = z2spinor(dir.path(), "modes", r#"{"command": "deform"}"#, &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = z2spinor(dir.path(), "bogus", "{}", &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = z2spinor(dir.path(), "modes", "{not json", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_check_exits_1_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = z2spinor(
        dir.path(),
        "estimates",
        r#"{"estimates": {"trials": 2, "decay_c_max": 1e-6}}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL decay_constant"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["config"]["estimates"]["trials"], 2);
}

#[test]
fn zero_amplitude_modes_write_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = z2spinor(dir.path(), "modes", r#"{"modes": {"amplitude": 0}}"#, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("out/modes.csv")).unwrap();
    assert_eq!(csv, "k,l,residual,residual_refined\n");
}

#[test]
fn index_scan_rows_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = z2spinor(dir.path(), "index-scan", r#"{"index_scan": {"trials": 6}}"#, &["--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rd = csv::Reader::from_path(dir.path().join("out/index_scan.csv")).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        ["trial_id", "M", "L", "tau", "dim_ker", "dim_coker", "index", "sigma_min_positive", "stable"]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    for r in &rows {
        assert_eq!(&r[6], "0");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "index-scan");
    assert_eq!(report["config"]["seed"], 3);
    assert_eq!(report["regimes"]["active"], "relaxed");
}

#[test]
fn iterate_writes_ledger_and_frame() {
    let dir = tempfile::tempdir().unwrap();
    let o = z2spinor(dir.path(), "iterate", r#"{"iterate": {"steps": 4, "points": 256}}"#, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ledger = std::fs::read_to_string(dir.path().join("out/ledger.csv")).unwrap();
    assert_eq!(ledger.lines().count(), 5);
    let frame: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/frame.json")).unwrap()).unwrap();
    assert!(frame.is_object());
}
