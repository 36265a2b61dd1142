use std::path::PathBuf;
use std::process::{Command, Output};

fn noiseflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noiseflow"))
        .args(args)
        .env_remove("NOISEFLOW_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn flows_pass_with_exit_zero() {
    let out = noiseflow(&["verify", "flows", "--t", "10", "--p", "1/2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(checks
        .iter()
        .any(|c| c["id"] == "flows.g3.p1/2.t10.mismatched_atoms"));
}

#[test]
fn theorem79_checks_every_subset() {
    let out = noiseflow(&["verify", "theorem79", "--n", "8", "--all-subsets"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 256);
    let lhs = &report["checks"][0]["lhs"];
    assert!(lhs["num"].is_string() && lhs["den"].is_string());
}

#[test]
fn seeded_runs_are_byte_identical() {
    for args in [
        &["run", "clt", "--i", "4096"][..],
        &["run", "poisson", "--samples", "500", "--seed", "9"],
    ] {
        let (a, b) = (noiseflow(args), noiseflow(args));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
    let a = noiseflow(&["run", "poisson", "--samples", "500", "--seed", "9"]);
    let b = noiseflow(&["run", "poisson", "--samples", "500", "--seed", "10"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        &["verify", "flows", "--p", "0.5"][..],
        &["run", "clt", "--unknown-key", "1"],
        &["run", "profile", "--generator", "nope"],
        &["verify", "flows", "--t", "12", "--budget", "10"],
        &["run", "microblock", "--rho", "2"],
    ] {
        let out = noiseflow(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn failed_threshold_exits_one() {
    // Windows of 32 meet two or three blocks of 16, so the mean falls below ρ².
    let out = noiseflow(&[
        "run",
        "microblock",
        "--i",
        "1024",
        "--lambda",
        "1",
        "--rho",
        "0.5",
        "--blocks",
        "64",
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL block"));
}

#[test]
fn csv_artifact_to_file() {
    let path = scratch("walsh.csv");
    let out = noiseflow(&[
        "verify",
        "walsh",
        "--n",
        "3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("check_id,lhs,rhs,pass"));
    assert!(lines.all(|l| l.ends_with(",true")));
    assert!(stdout(&out).contains("checks, 0 failed"));
}

#[test]
fn profile_reads_observable_json() {
    let path = scratch("parity.json");
    std::fs::write(&path, r#"{"n": 2, "values": [1.0, -1.0, -1.0, 1.0]}"#).unwrap();
    let out = noiseflow(&[
        "run",
        "profile",
        "--input",
        path.to_str().unwrap(),
        "--level",
        "1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["stats"]["card.2"], 1.0);
    assert_eq!(report["stats"]["cells.11"], 1.0);
}
