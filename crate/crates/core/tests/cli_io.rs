use std::path::Path;
use std::process::Command;

use electroconvection::cli_io::{
    parse_config, read_diagnostics, read_snapshot, run_simulation, RunConfig,
};
use electroconvection::dynamics::DiagnosticsRecord;
use electroconvection::Error;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_electroconvect"))
}

fn small_config(dir: &Path) -> RunConfig {
    let text = format!(
        r#"{{
            "mesh": {{"kind": "rectangle", "nx": 12, "ny": 12, "lx": 1.0, "ly": 1.0}},
            "modes": {{"m_velocity": 4, "n_charge": 6}},
            "time": {{"dt": 0.01, "t_end": 0.1, "diag_every": 2, "snapshot_times": [0.05]}},
            "initial_data": {{"velocity": "random(3, 1.0)", "charge": "gaussian-blob(0.5, 0.5, 0.15, 2.0)"}},
            "output": {{"directory": {:?}}},
            "seed": 7
        }}"#,
        dir.display().to_string()
    );
    parse_config(&text).unwrap()
}

#[test]
fn minimal_document_fills_defaults() {
    let cfg = parse_config("{}").unwrap();
    assert_eq!(cfg, RunConfig::default());
}

#[test]
fn misspelled_key_is_named() {
    let err = parse_config(r#"{"time": {"dt": 0.01, "viscosty": 1.0}}"#).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("viscosty"), "{msg}");
    assert!(msg.contains("time"), "{msg}");
}

#[test]
fn zero_step_is_rejected_with_its_path() {
    match parse_config(r#"{"time": {"dt": 0.0}}"#).unwrap_err() {
        Error::Config { path, .. } => assert_eq!(path, "time.dt"),
        e => panic!("unexpected {e}"),
    }
    assert!(parse_config(r#"{"initial_data": {"charge": "eigen:0"}}"#).is_err());
    assert!(parse_config("{not json").is_err());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    run_simulation(&small_config(d1.path()), None).unwrap();
    run_simulation(&small_config(d2.path()), None).unwrap();
    let a = std::fs::read(d1.path().join("diagnostics.csv")).unwrap();
    let b = std::fs::read(d2.path().join("diagnostics.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn run_writes_diagnostics_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_simulation(&small_config(dir.path()), None).unwrap();
    let records = read_diagnostics(&dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(records, out.trajectory.records);
    // steps 0, 2, 4, 6, 8, 10
    assert_eq!(records.len(), 6);
    let text = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), DiagnosticsRecord::HEADER);

    let snap = read_snapshot(&dir.path().join("snapshot_charge_000.csv")).unwrap();
    assert_eq!(snap.meta.field_name, "charge");
    assert!((snap.meta.time - 0.05).abs() < 1e-12);
    assert_eq!(snap.values.len(), 121);
    assert!(dir.path().join("snapshot_vorticity_000.json").exists());
    assert!(dir.path().join("config.effective.json").exists());
}

#[test]
fn cli_verify_passes_on_a_small_square() {
    let out = bin()
        .args(["verify", "--mesh", "square:16"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("0 failed"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn cli_eig_prints_closed_form() {
    let out = bin()
        .args(["eig", "--mesh", "square:16", "--m", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = stdout
        .lines()
        .filter(|l| l.contains("closed form"))
        .collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let nums: Vec<f64> = row
            .split_whitespace()
            .filter_map(|w| w.parse().ok())
            .collect();
        let (got, want) = (nums[1], nums[2]);
        assert!(((got - want) / want).abs() < 1e-10, "{row}");
    }
}

#[test]
fn cli_bad_usage_exits_one() {
    let out = bin().arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["eig", "--mesh", "disk"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--mesh"));
}

#[test]
fn cli_run_with_zero_data_records_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.json");
    std::fs::write(
        &cfg,
        r#"{"modes": {"m_velocity": 4, "n_charge": 4},
            "time": {"dt": 0.01, "t_end": 0.05, "diag_every": 1},
            "initial_data": {"velocity": "zero", "charge": "zero"}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["run", "--mesh", "square:12", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let records = read_diagnostics(&out_dir.join("diagnostics.csv")).unwrap();
    assert_eq!(records.len(), 6);
    for r in records {
        assert!(r.values()[1..].iter().all(|&v| v == 0.0));
    }
}

#[test]
fn cli_sweep_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "sweep",
            "--mesh",
            "square:12",
            "--m",
            "4",
            "--n",
            "8",
            "--samples",
            "5",
            "--active",
            "3",
            "--out",
        ])
        .arg(dir.path())
        .env("ELECTROCONVECT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 3, "{names:?}");
    let t =
        std::fs::read_to_string(dir.path().join("sweep_commutator_rect_12x12_1x1.csv")).unwrap();
    assert_eq!(t.lines().count(), 6);
}
