//! End-to-end checks of the ttstar binary: flags, exit codes, and the CSV and
//! JSON artifacts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ttstar"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ttstar-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_interior_writes_artifacts() {
    let dir = tmpdir("solve");
    let csv = dir.join("profiles.csv");
    let report = dir.join("report.json");
    let out = run(&[
        "solve",
        "--a", "2", "--b", "2",
        "--gamma0", "3/5", "--gamma1", "1/5",
        "--m", "853",
        "--out-csv", csv.to_str().unwrap(),
        "--out-report", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let csv_text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = csv_text.lines();
    assert_eq!(lines.next().unwrap(), "s,r,w0,w1,q0,q1,h");
    assert_eq!(csv_text.lines().count(), 854);

    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["schema"], 1);
    assert!(rep.get("timestamp_unix").is_none(), "no timestamp without --stamp");
    let p0 = rep["verification"]["pohozaev0"]["rel_err"].as_f64().unwrap();
    assert!(p0 < 0.01, "pohozaev rel err {p0}");
    assert_eq!(rep["verification"]["pohozaev_status"], "ok");
}

#[test]
fn solve_is_deterministic() {
    let dir = tmpdir("det");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let csv = dir.join(format!("run{i}.csv"));
        let report = dir.join(format!("run{i}.json"));
        let out = run(&[
            "solve",
            "--gamma0", "0.4", "--gamma1", "0.2",
            "--m", "427",
            "--out-csv", csv.to_str().unwrap(),
            "--out-report", report.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push((std::fs::read(&csv).unwrap(), std::fs::read(&report).unwrap()));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "CSV must be bit-identical");
    assert_eq!(outputs[0].1, outputs[1].1, "JSON must be bit-identical");
}

#[test]
fn solve_rejects_mixed_sign_range() {
    let out = run(&["solve", "--a", "2", "--b", "2", "--gamma0", "-0.3", "--gamma1", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("opposite signs"), "{err}");
}

#[test]
fn solve_names_violated_inequality() {
    let out = run(&["solve", "--gamma0", "4", "--gamma1", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gamma0 <= 2 + gamma1"), "{err}");
}

#[test]
fn solve_zero_data() {
    let out = run(&["solve", "--gamma0", "0", "--gamma1", "0", "--m", "427"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("pohozaev0"));
}

#[test]
fn solve_env_grid_override() {
    let out = bin()
        .args(["solve", "--gamma0", "0.2", "--gamma1", "0.1"])
        .env("TTSTAR_DEFAULT_GRID", "-10,2,301")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // flag beats env
    let out = bin()
        .args(["solve", "--gamma0", "0.2", "--gamma1", "0.1", "--m", "3"])
        .env("TTSTAR_DEFAULT_GRID", "not,a,grid")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gamma_closed_form_examples() {
    let out = run(&["gamma", "--case", "4", "--k", "0,-1,-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "3 1");

    let out = run(&["gamma", "--case", "4", "--k", "1,0,0"]);
    assert_eq!(stdout(&out).trim(), "3/5 1/5");

    let out = run(&["gamma", "--case", "2,2", "--gamma", "1/3,1", "--total-degree", "-3"]);
    assert_eq!(stdout(&out).trim(), "-2/3 -1 -2/3");
}

#[test]
fn gamma_check_cross_runs_routes() {
    let out = run(&["gamma", "--case", "5,1", "--k", "-1/2,-1,-1", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("AGREE"), "{text}");
    assert!(text.contains("4 2"), "{text}");
}

#[test]
fn gamma_rejects_bad_case() {
    let out = run(&["gamma", "--case", "7", "--k", "0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_text_flags_rows() {
    let out = run(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 13, "header + 12 rows");
    let p23 = text.lines().find(|l| l.starts_with("P(2,3)")).unwrap();
    assert!(p23.contains("outside"), "{p23}");
    let p1112 = text.lines().find(|l| l.starts_with("P(1,1,1,2)")).unwrap();
    assert!(p1112.contains("DISCREPANT"), "{p1112}");
    assert!(p1112.contains("3 1"), "derived value shown: {p1112}");
}

#[test]
fn catalog_json_schema() {
    let out = run(&["catalog", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], 1);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 12);
    let a4 = entries.iter().find(|e| e["name"] == "A4").unwrap();
    assert_eq!(a4["gamma_derived"], "3/5 1/5");
    assert_eq!(a4["admissibility"], "interior");
    assert_eq!(a4["discrepant"], false);
}

#[test]
fn structure_pass_and_fail_cases() {
    let out = run(&["structure", "--blocks", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("commutation") && text.contains("pass"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");

    let out = run(&["structure", "--blocks", "2,2"]);
    assert!(!stdout(&out).contains("FAIL"));

    let out = run(&["structure", "--blocks", "1,1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("FAIL (expected for 3+ blocks)"), "{text}");

    let out = run(&["structure", "--blocks", "0,2"]);
    assert_eq!(out.status.code(), Some(1));
}
