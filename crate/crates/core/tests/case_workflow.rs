use std::path::{Path, PathBuf};

use propwing::cases::{self, CaseConfig};
use propwing::error::Error;
use propwing::llt;
use propwing::planform::WingPlanform;

fn case(name: &str) -> CaseConfig {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../cases").join(name);
    CaseConfig::load(&p).unwrap()
}

#[test]
fn exported_planform_resolves_to_reported_metrics() {
    let cfg = case("w2.cfg");
    let dir = tempfile::tempdir().unwrap();
    let report = cases::run_case_in(&cfg, dir.path()).unwrap();
    assert!(report.converged());

    let text = std::fs::read_to_string(dir.path().join("planform_opt.csv")).unwrap();
    let wing = WingPlanform::from_csv(text.as_bytes()).unwrap();
    let inputs = &report.inputs;
    let sol = llt::solve(&wing, &inputs.polar, inputs.slip.as_ref(), &inputs.cond, &cfg.llt).unwrap();
    let opt = &report.result.sol_opt;
    assert!((sol.cl - opt.cl).abs() < 1e-6, "CL {} vs {}", sol.cl, opt.cl);
    assert!((sol.cd - opt.cd).abs() < 1e-6, "CD {} vs {}", sol.cd, opt.cd);
}

#[test]
fn report_lists_every_written_artifact() {
    let cfg = case("w1.cfg");
    let dir = tempfile::tempdir().unwrap();
    let report = cases::run_case_in(&cfg, dir.path()).unwrap();
    for name in &report.artifacts {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    let text = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(text.contains("computed.alpha_geo_deg="));
    assert!(text.contains("reference.alpha_geo_deg="));
}

#[test]
fn missing_polar_fails_at_polar_stage_and_writes_nothing() {
    let mut cfg = case("w1.cfg");
    cfg.polar.file = PathBuf::from("/nonexistent/polar.csv");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    match cases::run_case_in(&cfg, &out) {
        Err(Error::Case { stage, source, .. }) => {
            assert_eq!(stage, "polar");
            assert!(matches!(*source, Error::Io { .. }), "{source}");
        }
        other => panic!("expected a staged error, got {:?}", other.map(|r| r.name)),
    }
    assert!(!out.exists());
}

#[test]
fn empty_sweep_range_is_rejected() {
    let cfg = case("w1.cfg");
    let dir = tempfile::tempdir().unwrap();
    let err = cases::run_polar_sweep(&cfg, [4.0, -4.0, 1.0], dir.path()).unwrap_err();
    assert!(matches!(err, Error::Case { stage: "sweep", .. }), "{err}");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn slipstream_raises_lift_at_zero_incidence() {
    let cfg = case("w1.cfg");
    let dir = tempfile::tempdir().unwrap();
    let (on, off) = cases::run_polar_sweep(&cfg, [0.0, 0.0, 1.0], dir.path()).unwrap();
    let on = on.expect("case has a slipstream");
    assert_eq!(on.len(), 1);
    assert!(on[0].cl >= off[0].cl, "{} < {}", on[0].cl, off[0].cl);
    assert!(dir.path().join("polar_sweep_prop_on.csv").is_file());
    assert!(dir.path().join("polar_sweep_prop_off.csv").is_file());
}

#[test]
fn empty_case_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(cases::case_files(dir.path()), Err(Error::Validation(_))));
}
