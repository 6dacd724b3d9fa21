use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tentspace"))
}

#[test]
fn verify_writes_reports_and_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["verify", "multiplier", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.starts_with("PASS")), "{stdout}");
    for f in ["multiplier.json", "multiplier_checks.csv", "plotdata/manifest.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }

    let again = bin().arg("report").arg(dir.path().join("multiplier.json")).output().unwrap();
    assert!(again.status.success());
    assert_eq!(String::from_utf8(again.stdout).unwrap(), stdout);
}

#[test]
fn unknown_suite_is_an_error() {
    let out = bin().args(["verify", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_names_every_suite() {
    let out = bin().args(["verify", "list"]).output().unwrap();
    let ids: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(str::to_string).collect();
    assert_eq!(ids, tentspace::harness::SUITE_IDS);
}

#[test]
fn norm_of_identity() {
    let out = bin().args(["norm", "--f", r#"{"type":"poly","coeffs":[0,1]}"#, "--kind", "lp"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // jet |f(0)|^2 = 0 plus kernel test at a = 0: int |1|^2 (1-|z|^2)^3 dA = 1/4
    let value: f64 = String::from_utf8(out.stdout).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!((value - 0.5).abs() < 1e-6, "{value}");
}

#[test]
fn lattice_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lattice.json");
    let out = bin().args(["lattice", "--r", "1", "--kappa", "0.4", "--cap", "0.9", "--output"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(json.is_object());
}

#[test]
fn bad_function_spec_is_rejected() {
    let out = bin().args(["norm", "--f", r#"{"type":"wave"}"#]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown term type"));
}
