//! End-to-end runs of the `toda-lab` binary.

use std::path::Path;
use std::process::Command;

fn lab(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_toda-lab"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("TODA_LAB_THREADS", "1")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn suite_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = lab(&["suite"], &dir.path().join("a"));
    assert_eq!(code, 0, "{stdout}");
    lab(&["suite"], &dir.path().join("b"));
    let a = std::fs::read(dir.path().join("a/suite.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/suite.json")).unwrap();
    assert_eq!(a, b);
    let parsed: toda_rh::verify::SuiteOutcome = serde_json::from_slice(&a).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &a[..]);
}

#[test]
fn mutated_s2_fails_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = lab(&["suite", "--mutate-s2"], dir.path());
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL monodromy"), "{stdout}");
}

#[test]
fn config_errors_give_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), r#"{"xi": [0.05]}"#);
    assert_eq!(lab(&["verify", "--config", &bad], dir.path()).0, 2);
    let unknown = write_config(dir.path(), r#"{"nonsense": 1}"#);
    assert_eq!(lab(&["model", "--config", &unknown], dir.path()).0, 2);
    assert_eq!(lab(&["model", "--config", "/nonexistent/c.json"], dir.path()).0, 2);
    assert_eq!(lab(&["suite", "--tol-scale", "-1"], dir.path()).0, 2);
}

#[test]
fn buffer_violation_gives_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let small = write_config(dir.path(), r#"{"half_width": 30, "t_end": 60}"#);
    assert_eq!(lab(&["simulate", "--config", &small], dir.path()).0, 3);
}

#[test]
fn verify_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let short = write_config(dir.path(), r#"{"t_end": 40, "half_width": 200}"#);
    let (code, stdout) = lab(&["verify", "--config", &short], dir.path());
    assert_eq!(code, 0, "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(csv.starts_with("branch,t,xi,n,a_sim,a_pred,b_sim,b_pred,err_a,err_b\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 9);
    let rep: toda_rh::verify::VerifyReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert!(rep.pass && rep.c_calibrated);
}

#[test]
fn gfun_writes_sign_grids() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"xi": [0.5], "grid": 40}"#);
    let (code, _) = lab(&["gfun", "--config", &cfg], dir.path());
    assert_eq!(code, 0);
    let grid = toda_rh::phase::SignGrid::read_csv(std::fs::File::open(dir.path().join("signature_re_phi_xi0.5.csv")).unwrap())
        .unwrap();
    assert_eq!(grid.xs.len(), 40);
    let ctx = toda_rh::phase::PhaseContext::new(0.5).unwrap();
    assert_eq!(toda_rh::phase::region_count(toda_rh::phase::Field::RePhi, &ctx, &grid), 4);
}
