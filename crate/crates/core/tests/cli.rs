use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_funnel-lab"));
    c.env_remove("FUNNEL_LAB_OUT");
    c
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .map(|it| it.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    v.sort();
    v
}

#[test]
fn check_prop2_prints_margin() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["check-prop2", "--a", "0.96", "--omega-over-rho", "5", "--m", "2", "--interval", "1.5708", "4.7124", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "alternative 1, margin 0.609");
    let names = files(dir.path());
    assert_eq!(names.len(), 2);
    assert!(names.iter().all(|n| n.starts_with("check-prop2-")));
}

#[test]
fn check_prop1_reports_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["check-prop1", "--a", "0.3", "--omega-over-rho", "1", "--mu", "1e-3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("residual"));
    let csv = files(dir.path()).into_iter().find(|n| n.ends_with(".csv")).unwrap();
    let text = std::fs::read_to_string(dir.path().join(csv)).unwrap();
    assert_eq!(text.lines().next(), Some("phi,zeta,z"));
    assert_eq!(text.lines().count(), 1 + 1024);
}

#[test]
fn selftest_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["selftest", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unknown_subcommand_and_flag_exit_two() {
    let out = bin().arg("no-such-command").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = bin().args(["selftest", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameter_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["check-prop1", "--a", "1.5", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["iterate-map", "--set", "map.nonsense=1", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analysis_failure_exits_one_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    // a = 0.3 leaves no room for a 2-strip horseshoe
    let out = bin().args(["horseshoe", "--a", "0.3", "--m", "2", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(files(dir.path()).len(), 2);
}

#[test]
fn env_var_overrides_out_dir() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let out = bin()
        .env("FUNNEL_LAB_OUT", env.path())
        .args(["sine-branches", "--map", "sine", "--amplitude", "10", "--out"])
        .arg(flag.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(files(flag.path()).is_empty());
    assert_eq!(files(env.path()).len(), 2);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[model1d]\nmu = 0.02\n\n[map]\nkind = \"model1d\"\nsteps = 50\n").unwrap();
    let out = bin()
        .args(["iterate-map", "--config"])
        .arg(&cfg)
        .args(["--set", "model1d.mu=0.01", "--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json = files(&dir.path().join("out")).into_iter().find(|n| n.ends_with(".json")).unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("out").join(json)).unwrap()).unwrap();
    assert_eq!(doc["spec"]["config"]["model1d"]["mu"], 0.01);
    assert_eq!(doc["spec"]["config"]["map"]["steps"], 50);
    assert_eq!(doc["provenance"]["config"], doc["spec"]["config"]);
}
