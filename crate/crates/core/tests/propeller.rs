use std::path::{Path, PathBuf};

use propwing::cases::{self, CtSweepSpec};
use propwing::error::Error;
use propwing::polar::{self, LiftMode};
use propwing::slipstream::{self, PropOperatingPoint, PropellerGeometry};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn da4002() -> PropellerGeometry {
    let section = polar::load_polar_file(&data("prop_section_re100k.csv"), 1e5).unwrap();
    slipstream::load_propeller_file(&data("da4002_like.csv"), section).unwrap()
}

fn sweep_spec(rpm: f64) -> CtSweepSpec {
    CtSweepSpec {
        geometry: data("da4002_like.csv"),
        section_polar: data("prop_section_re100k.csv"),
        section_reynolds: 1e5,
        rpm,
        rho: 1.225,
        v_range: [3.8, 17.15, 0.445],
    }
}

/// Thrust of the bare blade elements with no induced velocity.
fn strip_thrust(geom: &PropellerGeometry, op: &PropOperatingPoint) -> f64 {
    let omega = op.omega();
    let dt: Vec<f64> = geom
        .r_stations
        .iter()
        .zip(&geom.chord)
        .zip(&geom.twist)
        .map(|((&r, &c), &beta)| {
            let phi = (op.v_inf / (omega * r)).atan();
            let cl = geom.section_polar.cl_of_alpha(beta - phi, LiftMode::Tabulated).unwrap();
            let cd = geom.section_polar.cd_of_cl(cl);
            let w2 = op.v_inf.powi(2) + (omega * r).powi(2);
            0.5 * op.rho * w2 * c * geom.n_blades as f64 * (cl * phi.cos() - cd * phi.sin())
        })
        .collect();
    geom.r_stations
        .windows(2)
        .zip(dt.windows(2))
        .map(|(r, t)| 0.5 * (t[0] + t[1]) * (r[1] - r[0]))
        .sum()
}

#[test]
fn induction_reduces_thrust_below_strip_theory() {
    let geom = da4002();
    for v in [6.0, 9.5, 13.0] {
        let op = PropOperatingPoint::from_rpm(v, 5000.0, 1.225).unwrap();
        let bem = slipstream::run_bem(&geom, &op).unwrap();
        let strip = strip_thrust(&geom, &op);
        assert!(bem.thrust > 0.0 && bem.thrust < strip, "v {v}: {} vs {strip}", bem.thrust);
    }
}

#[test]
fn disc_momentum_matches_thrust_coefficient() {
    let geom = da4002();
    let op = PropOperatingPoint::from_rpm(3.8, 5000.0, 1.225).unwrap();
    let bem = slipstream::run_bem(&geom, &op).unwrap();
    let ct = bem.thrust_coefficient(&op, &geom);
    assert!(ct > 0.05 && ct < 0.2, "CT {ct}");
    // Mean axial induction over the disc from simple momentum theory.
    let j = slipstream::advance_ratio(&op, &geom);
    let k = 8.0 * ct / (std::f64::consts::PI * j * j);
    let a_disc = 0.5 * (-1.0 + (1.0 + k).sqrt());
    let r0 = geom.r_stations[0];
    let r1 = geom.tip_radius();
    let weighted: f64 = bem
        .r
        .windows(2)
        .zip(bem.a_axial.windows(2))
        .map(|(r, a)| 0.5 * (a[0] * r[0] + a[1] * r[1]) * (r[1] - r[0]))
        .sum::<f64>()
        / (0.5 * (r1 * r1 - r0 * r0));
    assert!((weighted - a_disc).abs() < 0.25 * a_disc, "BEM {weighted} vs momentum {a_disc}");
}

#[test]
fn ct_sweep_spans_expected_advance_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let points = cases::run_ct_sweep(&sweep_spec(5000.0), dir.path()).unwrap();
    assert_eq!(points.len(), 31);
    assert!((points[0].0 - 0.2).abs() < 5e-3, "J0 {}", points[0].0);
    assert!((points[30].0 - 0.9).abs() < 5e-3, "J1 {}", points[30].0);
    let csv = std::fs::read_to_string(dir.path().join("ct_sweep.csv")).unwrap();
    assert!(csv.starts_with("J,CT\n"));
    assert!(dir.path().join("ct_sweep.svg").is_file());
}

#[test]
fn zero_rpm_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = cases::run_ct_sweep(&sweep_spec(0.0), dir.path()).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
