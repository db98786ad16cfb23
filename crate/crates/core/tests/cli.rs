use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn propwing() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_propwing"));
    c.current_dir(root());
    c
}

#[test]
fn polar_fit_prints_slope() {
    let out = propwing().args(["polar", "fit", "data/e423_re300k.csv"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("a0_per_rad="), "{text}");
}

#[test]
fn quiet_suppresses_results() {
    let out = propwing()
        .args(["--quiet", "polar", "fit", "data/e423_re300k.csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_shaft_speed_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = propwing()
        .arg("--out")
        .arg(dir.path())
        .args([
            "prop",
            "ct-sweep",
            "--geometry",
            "data/da4002_like.csv",
            "--section-polar",
            "data/prop_section_re100k.csv",
            "--rpm",
            "0",
            "--speed",
            "4",
            "10",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_case_file_exits_nonzero() {
    let out = propwing().args(["case", "run", "cases/none.cfg"]).output().unwrap();
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}
