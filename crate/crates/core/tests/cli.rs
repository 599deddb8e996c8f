use std::path::Path;
use std::process::Command;

use css_engineering::cli::{self, RunConfig, RunOptions, TABLE_COLUMNS};
use css_engineering::metrics::RunReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_css-eng"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_OPTIMIZE: &str = r#"{
  "mode": "optimize",
  "scheme": "s2_line",
  "target": "NS(2,0.3)",
  "window": {"delta": 0.15, "grid_points": 5},
  "ga": {"population": 30, "generations": 40, "restarts": 2}
}"#;

#[test]
fn malformed_target_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"mode":"optimize","scheme":"s1_line","target":"AS(1,2","window":{"delta":0.3}}"#,
    );
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(out.stderr.trim_ascii_end()).unwrap();
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn missing_config_exits_2() {
    let out = bin().args(["--config", "/nonexistent/run.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn heavy_tail_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tail.json",
        r#"{"mode":"evaluate","scheme":"s2_line","target":"SV(3,0)",
            "params":{"alpha":50,"phi":0.01,"x1":0.5,"x2":0.0,"r":0.3,"gamma":0.5},
            "window":{"delta":0.2}}"#,
    );
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn same_seed_gives_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "opt.json", SMALL_OPTIMIZE);
    let run = |seed: &str, jobs: &str, name: &str| {
        let out = dir.path().join(name);
        let st = bin()
            .arg("--config")
            .arg(&cfg)
            .args(["--seed", seed, "--jobs", jobs, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read(out).unwrap()
    };
    let a = run("5", "1", "a.json");
    let b = run("5", "3", "b.json");
    let c = run("6", "1", "c.json");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn report_round_trips_through_json() {
    let cfg = RunConfig::from_json(SMALL_OPTIMIZE).unwrap();
    let out = cli::run(&cfg, &RunOptions::default()).unwrap();
    let report: RunReport = serde_json::from_str(&out.body).unwrap();
    assert_eq!(report.schema_version, css_engineering::metrics::SCHEMA_VERSION);
    assert!(report.optimizer.is_some());
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, out.body);
    let back: RunReport = serde_json::from_str(&again).unwrap();
    assert_eq!(back, report);
}

#[test]
fn evaluate_published_row_echoes_beta() {
    let cfg = RunConfig::from_json(r#"{"mode":"evaluate","row":"III.8","refine":true}"#).unwrap();
    let out = cli::run(&cfg, &RunOptions::default()).unwrap();
    let r: RunReport = serde_json::from_str(&out.body).unwrap();
    assert!(r.epsilon < 5.5e-3 && r.epsilon > 5.5e-5, "{}", r.epsilon);
    assert_eq!(format!("{:.2}", r.beta), "0.45");
    assert_eq!(Some(r.delta), css_engineering::tables::row("III.8").unwrap().window.map(|w| w.delta));
}

#[test]
fn table_mode_writes_one_row_per_entry_and_flags_misses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.json", r#"{"mode":"table","table":"V","refine_starts":6}"#);
    let csv_path = dir.path().join("v.csv");
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&csv_path)
        .output()
        .unwrap();
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers.join(","), TABLE_COLUMNS);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 9);
    let misses = rows.iter().filter(|r| &r[9] == "false").count();
    assert_eq!(out.status.code(), Some(if misses > 0 { 4 } else { 0 }));
    for r in &rows {
        assert_eq!(&r[0], "1");
        assert!(r[5].contains('e'));
    }
}

#[test]
fn sqvac_and_sweep_csv() {
    let cfg = RunConfig::from_json(r#"{"mode":"sqvac-approx","sqvac":{"r":[0.5],"n":[3,7]}}"#).unwrap();
    let out = cli::run(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(out.body.lines().count(), 3);
    assert!(out.body.starts_with(cli::SQVAC_COLUMNS));

    let cfg = RunConfig::from_json(
        r#"{"mode":"prob-sweep","row":"IV.7","deltas":[0.05,0.1,0.2],"window":{"delta":0.1,"grid_points":5}}"#,
    )
    .unwrap();
    let out = cli::run(&cfg, &RunOptions::default()).unwrap();
    let mut rdr = csv::Reader::from_reader(out.body.as_bytes());
    let p: Vec<f64> = rdr.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(p.len(), 3);
    assert!(p.windows(2).all(|w| w[1] > w[0]));
}
