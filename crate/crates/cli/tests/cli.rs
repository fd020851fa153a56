use std::path::Path;
use std::process::{Command, Output};

fn sit(args: &[&str], dir: &Path, config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sit"));
    cmd.args(args).arg("--out").arg(dir.join("out")).env_remove("SIT_WORKERS");
    if let Some(text) = config {
        let path = dir.join("config.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

const SMALL: &str = r#"
[grid]
x_min = -40.0
x_max = 60.0
dx = 0.5

[scheme]
t_end = 20.0
snapshot_every = 5.0

[release]
A = 600.0
eta = 0.2
c = -0.3
"#;

#[test]
fn simulate_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = sit(&["simulate"], dir.path(), Some(SMALL));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/snapshots.csv")).unwrap();
    assert!(csv.starts_with("t,x,E,F,M,Ms\n"));
    assert!(dir.path().join("out/summary.json").exists());
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = sit(&["verify"], dir.path(), None);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("checks pass"));

    let broken = sit(&["verify"], dir.path(), Some("[verify]\nms_amplitude = 0.0\n"));
    assert_eq!(broken.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&broken.stdout).contains("first failing check: sterile bound"));

    let positive = sit(&["verify"], dir.path(), Some("[verify]\nspeeds = [0.1]\n"));
    assert_eq!(positive.status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let sub = sit(&["speed"], dir.path(), Some("[params]\nbeta = 0.3\n"));
    assert_eq!(sub.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&sub.stderr).contains("error:"));

    let bracket = sit(&["search"], dir.path(), Some("[search]\nbracket = [600.0, 600.0]\n"));
    assert_eq!(bracket.status.code(), Some(2));

    let workers = Command::new(env!("CARGO_BIN_EXE_sit")).args(["verify", "--print-config"]).env("SIT_WORKERS", "0").output().unwrap();
    assert_eq!(workers.status.code(), Some(2));

    let missing = sit(&["simulate", "--config", "/nonexistent/config.toml"], dir.path(), None);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn unstable_time_step_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}\n").replace("dx = 0.5", "dx = 4.0").replace("t_end = 20.0", "t_end = 20.0\ncfl_reaction_cap = 1000.0");
    let out = sit(&["simulate"], dir.path(), Some(&cfg));
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn print_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = sit(&["figure1", "--print-config", "--workers", "2"], dir.path(), Some(SMALL));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("kind = \"figure1\""));
    assert!(text.contains("workers = 2"));
    let again = sit(&["figure1", "--print-config"], dir.path(), Some(&text));
    assert_eq!(String::from_utf8(again.stdout).unwrap().replace("workers = 2\n", ""), text.replace("workers = 2\n", ""));
}
