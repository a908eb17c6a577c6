//! Black-box tests of the `plwb` binary: exit codes, artifacts, and
//! messages.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plwb"))
}

fn model(name: &str) -> PathBuf {
    PathBuf::from(format!(
        "{}/../../models/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_accepts_shipped_models() {
    for name in [
        "vending_price10.plm",
        "vending_price15.plm",
        "elevator_typo.plm",
        "deadlock_demo.plm",
        "deadlock_fixed.plm",
    ] {
        let out = bin().arg("validate").arg(model(name)).output().unwrap();
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        assert_eq!(stdout(&out).trim(), "ok");
    }
}

#[test]
fn validate_missing_file_exits_1() {
    let out = bin().arg("validate").arg("no_such.plm").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_parse_error_exits_1_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.plm");
    std::fs::write(&path, "begin actions\n  a $ b\nend actions\n").unwrap();
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("2:5"), "{}", stderr(&out));
}

#[test]
fn validate_diagnostics_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diag.plm");
    // References an undeclared feature; parses fine, fails validation.
    std::fs::write(
        &path,
        "begin feature tree\n\
             Root -> mandatory Core\n\
         end feature tree\n\
         begin feature constraints\n\
             Core requires Ghost\n\
         end feature constraints\n\
         begin actions\n\
             a\n\
         end actions\n\
         begin processes diagram\n\
             begin process p\n\
                 states = s\n\
                 transitions = s -(a, 1)-> s\n\
             end process\n\
         end processes diagram\n\
         begin init\n\
             installedFeatures = { Core }\n\
             initialProcesses = p\n\
         end init\n",
    )
    .unwrap();
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Ghost"), "{}", stderr(&out));
}

#[test]
fn simulate_writes_the_requested_number_of_cases() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("simulate")
        .arg(model("deadlock_demo.plm"))
        .args(["--sims", "25", "--seed", "5"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("25 simulations"));
    let log = std::fs::read_to_string(dir.path().join("events.csv")).unwrap();
    let mut lines = log.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,caseId,action,source,target,installed,vars"
    );
    let cases: std::collections::BTreeSet<&str> =
        lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(cases.len(), 25);
}

#[test]
fn analyze_prints_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("analyze")
        .arg(model("deadlock_demo.plm"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("spent"));
    assert!(text.contains("simulations:"));
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.starts_with("depth,property,mean,ciHalfWidth,n,delta\n"));
}

#[test]
fn analyze_rejects_out_of_range_analysis_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("analyze")
        .arg(model("deadlock_demo.plm"))
        .args(["--analysis", "3"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("out of range"));
}

#[test]
fn mine_and_diff_work_on_a_fresh_log() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .arg("simulate")
        .arg(model("deadlock_demo.plm"))
        .args(["--sims", "50"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let log = dir.path().join("events.csv");

    let hn = dir.path().join("hn.dot");
    let out = bin()
        .arg("mine")
        .arg(&log)
        .arg("--out")
        .arg(&hn)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let dot = std::fs::read_to_string(&hn).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("START"));

    let diff = dir.path().join("diff.dot");
    let out = bin()
        .arg("diff")
        .arg(model("deadlock_demo.plm"))
        .arg(&log)
        .arg("--out")
        .arg(&diff)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("specOnly edges"));
    assert!(std::fs::read_to_string(&diff).unwrap().contains("DEADLOCK"));
}

#[test]
fn mine_rejects_an_empty_log() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    std::fs::write(&path, "step,caseId,action,source,target,installed,vars\n").unwrap();
    let out = bin().arg("mine").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no cases"));
}

#[test]
fn pipeline_writes_manifest_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("pipeline")
        .arg(model("deadlock_fixed.plm"))
        .args(["--seed", "11"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "events.csv",
        "report.csv",
        "spec.dot",
        "mined.dot",
        "hn.dot",
        "diff.dot",
        "manifest.json",
    ] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["failed_stage"], serde_json::Value::Null);
    assert!(manifest["simulations"].as_u64().unwrap() >= 40);
    assert!(manifest["stages"].as_array().unwrap().len() >= 5);
}
