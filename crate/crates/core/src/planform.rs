//! Wing geometry: Bezier chord and twist laws over the semi-span.
//!
//! Spanwise position is measured by `eta = |y| / s` where `s` is the
//! semi-span; every wing here is symmetric about the root.

use std::io::Read;

use crate::error::{Error, Result};
use crate::interp;
use crate::table;

/// Number of stations per semi-span in planform exports.
pub const EXPORT_STATIONS: usize = 101;

const CHORD_SAMPLES: usize = 64;

// 4-point Gauss-Legendre on [0, 1]; exact for polynomials up to degree 7.
const GAUSS4_NODES: [f64; 4] = [
    0.069_431_844_202_973_71,
    0.330_009_478_207_571_9,
    0.669_990_521_792_428_1,
    0.930_568_155_797_026_3,
];
const GAUSS4_WEIGHTS: [f64; 4] = [
    0.173_927_422_568_726_93,
    0.326_072_577_431_273_07,
    0.326_072_577_431_273_07,
    0.173_927_422_568_726_93,
];

/// Spanwise chord and twist laws as seen by the lifting-line solver.
pub trait WingGeometry {
    fn semi_span(&self) -> f64;
    /// Chord (m) at `eta ∈ [0, 1]`.
    fn chord_at(&self, eta: f64) -> f64;
    /// Section twist (rad) at `eta ∈ [0, 1]`.
    fn twist_at(&self, eta: f64) -> f64;
    /// Reference (planform) area of the full wing, m².
    fn area(&self) -> f64;

    fn aspect_ratio(&self) -> f64 {
        let b = 2.0 * self.semi_span();
        b * b / self.area()
    }
}

/// Scalar cubic Bezier on `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicBezier(pub [f64; 4]);

impl CubicBezier {
    pub fn constant(v: f64) -> Self {
        Self([v; 4])
    }

    /// Degree-elevated straight line from `start` to `end`.
    pub fn linear(start: f64, end: f64) -> Self {
        let d = end - start;
        Self([start, start + d / 3.0, start + 2.0 * d / 3.0, end])
    }

    pub fn eval(&self, t: f64) -> f64 {
        let [p0, p1, p2, p3] = self.0;
        let s = 1.0 - t;
        s * s * s * p0 + 3.0 * s * s * t * p1 + 3.0 * s * t * t * p2 + t * t * t * p3
    }

    /// Exact mean over `[0, 1]`: each Bernstein basis integrates to 1/4.
    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / 4.0
    }

    pub fn min_control(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Symmetric wing with cubic-Bezier chord and twist over the semi-span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingPlanform {
    pub semi_span: f64,
    pub chord: CubicBezier,
    pub twist: CubicBezier,
    /// Leading-edge sweep (rad); carried for plots only.
    pub sweep_le: f64,
    /// Geometric incidence of the wing root chord (rad).
    pub alpha_geo: f64,
}

impl WingPlanform {
    pub fn new(
        semi_span: f64,
        chord: CubicBezier,
        twist: CubicBezier,
        sweep_le: f64,
        alpha_geo: f64,
    ) -> Result<Self> {
        let p = Self {
            semi_span,
            chord,
            twist,
            sweep_le,
            alpha_geo,
        };
        p.validate()?;
        Ok(p)
    }

    /// Positive span and a chord that stays positive along the whole span.
    pub fn validate(&self) -> Result<()> {
        if !(self.semi_span > 0.0 && self.semi_span.is_finite()) {
            return Err(Error::validation(format!("semi-span {} must be positive", self.semi_span)));
        }
        if self.chord.0.iter().chain(&self.twist.0).any(|v| !v.is_finite()) {
            return Err(Error::validation("planform control values must be finite"));
        }
        // The Bezier hull bound settles most cases; sampling covers the rest.
        if self.chord.min_control() > 0.0 {
            return Ok(());
        }
        for i in 0..CHORD_SAMPLES {
            let t = i as f64 / (CHORD_SAMPLES - 1) as f64;
            let c = self.chord.eval(t);
            if !(c > 0.0) {
                return Err(Error::validation(format!("chord {c} m at eta = {t:.4} is not positive")));
            }
        }
        Ok(())
    }

    pub fn eval_chord(&self, t: f64) -> Result<f64> {
        check_unit(t)?;
        Ok(self.chord.eval(t))
    }

    pub fn eval_twist(&self, t: f64) -> Result<f64> {
        check_unit(t)?;
        Ok(self.twist.eval(t))
    }

    /// Full-wing area from the exact Bezier mean chord.
    pub fn wing_area(&self) -> f64 {
        2.0 * self.semi_span * self.chord.mean()
    }

    /// Mean aerodynamic chord, `(2/S) ∫₀ˢ c² dy`.
    pub fn mac(&self) -> f64 {
        let integral: f64 = GAUSS4_NODES
            .iter()
            .zip(GAUSS4_WEIGHTS)
            .map(|(&t, w)| w * self.chord.eval(t).powi(2))
            .sum();
        2.0 * self.semi_span * integral / self.wing_area()
    }

    pub fn snapshot(&self, stations: usize) -> GeometrySnapshot {
        let n = stations.max(2);
        let eta: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        GeometrySnapshot {
            y: eta.iter().map(|t| t * self.semi_span).collect(),
            chord: eta.iter().map(|&t| self.chord.eval(t)).collect(),
            twist: eta.iter().map(|&t| self.twist.eval(t)).collect(),
            area: self.wing_area(),
            aspect_ratio: self.aspect_ratio(),
            mac: self.mac(),
        }
    }

    /// Planform CSV (`y_m,chord_m,twist_deg`) with metadata header lines.
    /// The Bezier control values are recorded so the file reloads exactly.
    pub fn to_csv(&self) -> String {
        let snap = self.snapshot(EXPORT_STATIONS);
        let join = |v: &[f64; 4]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";");
        let mut out = String::new();
        out.push_str(&format!("# area_m2={}\n", snap.area));
        out.push_str(&format!("# AR={}\n", snap.aspect_ratio));
        out.push_str(&format!("# mac_m={}\n", snap.mac));
        out.push_str(&format!("# semi_span_m={}\n", self.semi_span));
        out.push_str(&format!("# chord_ctrl_m={}\n", join(&self.chord.0)));
        out.push_str(&format!("# twist_ctrl_rad={}\n", join(&self.twist.0)));
        out.push_str(&format!("# sweep_le_rad={}\n", self.sweep_le));
        out.push_str(&format!("# alpha_geo_rad={}\n", self.alpha_geo));
        table::write_rows(
            &mut out,
            "y_m,chord_m,twist_deg",
            (0..snap.y.len()).map(|i| vec![snap.y[i], snap.chord[i], snap.twist[i].to_degrees()]),
        );
        out
    }

    /// Reloads a planform written by [`Self::to_csv`] from its control-value
    /// metadata.
    pub fn from_csv<R: Read>(mut source: R) -> Result<Self> {
        let mut text = String::new();
        source
            .read_to_string(&mut text)
            .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        let meta = table::metadata(&text);
        let ctrl = |key: &str| -> Result<[f64; 4]> {
            let raw = table::metadata_value(&meta, key)
                .ok_or_else(|| Error::validation(format!("planform file lacks `{key}` metadata")))?;
            let vals: Vec<f64> = raw
                .split(';')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::validation(format!("bad `{key}` metadata `{raw}`")))?;
            vals.try_into()
                .map_err(|_| Error::validation(format!("`{key}` needs four values")))
        };
        let semi_span = table::metadata_f64(&meta, "semi_span_m")?
            .ok_or_else(|| Error::validation("planform file lacks `semi_span_m` metadata"))?;
        let sweep = table::metadata_f64(&meta, "sweep_le_rad")?.unwrap_or(0.0);
        let alpha = table::metadata_f64(&meta, "alpha_geo_rad")?.unwrap_or(0.0);
        Self::new(
            semi_span,
            CubicBezier(ctrl("chord_ctrl_m")?),
            CubicBezier(ctrl("twist_ctrl_rad")?),
            sweep,
            alpha,
        )
    }
}

impl WingGeometry for WingPlanform {
    fn semi_span(&self) -> f64 {
        self.semi_span
    }

    fn chord_at(&self, eta: f64) -> f64 {
        self.chord.eval(eta)
    }

    fn twist_at(&self, eta: f64) -> f64 {
        self.twist.eval(eta)
    }

    fn area(&self) -> f64 {
        self.wing_area()
    }
}

fn check_unit(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("normalised span position {t} outside [0, 1]")))
    }
}

/// Sampled geometry over one semi-span.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySnapshot {
    pub y: Vec<f64>,
    pub chord: Vec<f64>,
    pub twist: Vec<f64>,
    pub area: f64,
    pub aspect_ratio: f64,
    pub mac: f64,
}

/// Inputs for a trapezoidal control wing with linear washout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlWingSpec {
    /// Tip-to-tip span, m.
    pub span: f64,
    pub area: f64,
    pub root_chord: f64,
    pub tip_chord: f64,
    /// Tip twist relative to the root (rad); negative is washout.
    pub washout: f64,
    pub sweep_le: f64,
    pub alpha_geo: f64,
}

/// Relative mismatch allowed between the stated area and the trapezoid
/// implied by the root/tip chords.
pub const CONTROL_AREA_TOLERANCE: f64 = 1e-3;

/// Trapezoidal control wing: linear chord and linear twist, each written
/// as an exactly degree-elevated cubic.
pub fn control_wing(spec: &ControlWingSpec) -> Result<WingPlanform> {
    if !(spec.span > 0.0 && spec.area > 0.0) {
        return Err(Error::validation("control wing span and area must be positive"));
    }
    if !(spec.root_chord > 0.0 && spec.tip_chord > 0.0) {
        return Err(Error::validation("control wing root and tip chords must be positive"));
    }
    let trapezoid = 0.5 * spec.span * (spec.root_chord + spec.tip_chord);
    if ((trapezoid - spec.area) / spec.area).abs() > CONTROL_AREA_TOLERANCE {
        return Err(Error::validation(format!(
            "root/tip chords {} m / {} m give area {trapezoid:.5} m², expected {} m²",
            spec.root_chord, spec.tip_chord, spec.area
        )));
    }
    WingPlanform::new(
        0.5 * spec.span,
        CubicBezier::linear(spec.root_chord, spec.tip_chord),
        CubicBezier::linear(0.0, spec.washout),
        spec.sweep_le,
        spec.alpha_geo,
    )
}

/// Root and tip chords of the straight-tapered wing with the given span,
/// area and mean aerodynamic chord (taper ratio ≤ 1 branch).
pub fn trapezoid_from_mac(span: f64, area: f64, mac: f64) -> Result<(f64, f64)> {
    let mean = area / span;
    let q = 0.75 * mac / mean;
    // (1 + λ + λ²) / (1 + λ)² = q
    let (a, b) = (1.0 - q, 1.0 - 2.0 * q);
    let disc = b * b - 4.0 * a * a;
    if !(mac >= mean) || disc < 0.0 {
        return Err(Error::validation(format!(
            "MAC {mac} m is not achievable by a trapezoid with mean chord {mean:.5} m"
        )));
    }
    let taper = if a.abs() < 1e-15 { 1.0 } else { (-b - disc.sqrt()) / (2.0 * a) };
    let root = 2.0 * mean / (1.0 + taper);
    Ok((root, taper * root))
}

/// Elliptic chord law with no twist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticWing {
    pub semi_span: f64,
    pub root_chord: f64,
}

impl EllipticWing {
    /// Elliptic wing with the given aspect ratio and semi-span.
    pub fn with_aspect_ratio(semi_span: f64, aspect_ratio: f64) -> Self {
        let area = (2.0 * semi_span).powi(2) / aspect_ratio;
        Self {
            semi_span,
            root_chord: 2.0 * area / (std::f64::consts::PI * semi_span),
        }
    }
}

impl WingGeometry for EllipticWing {
    fn semi_span(&self) -> f64 {
        self.semi_span
    }

    fn chord_at(&self, eta: f64) -> f64 {
        self.root_chord * (1.0 - eta * eta).max(0.0).sqrt()
    }

    fn twist_at(&self, _eta: f64) -> f64 {
        0.0
    }

    fn area(&self) -> f64 {
        0.5 * std::f64::consts::PI * self.semi_span * self.root_chord
    }
}

/// Geometry given by stations over the semi-span, interpolated linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedWing {
    eta: Vec<f64>,
    chord: Vec<f64>,
    twist: Vec<f64>,
    semi_span: f64,
    area: f64,
}

impl TabulatedWing {
    /// `y` must run from the root (0) to the tip; twist in radians.
    pub fn new(y: Vec<f64>, chord: Vec<f64>, twist: Vec<f64>) -> Result<Self> {
        if y.len() < 2 || chord.len() != y.len() || twist.len() != y.len() {
            return Err(Error::validation("tabulated wing needs ≥ 2 stations of equal length"));
        }
        if y[0] != 0.0 || !interp::is_strictly_increasing(&y) {
            return Err(Error::validation("tabulated wing stations must start at 0 and increase"));
        }
        if chord.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::validation("tabulated wing chords must be positive"));
        }
        let semi_span = y[y.len() - 1];
        let area = 2.0 * interp::trapezoid(&y, &chord);
        Ok(Self {
            eta: y.iter().map(|v| v / semi_span).collect(),
            chord,
            twist,
            semi_span,
            area,
        })
    }

    /// Reads `y_m,chord_m,twist_deg` rows, ignoring any metadata.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let rows = table::read_table(source, &["y_m", "chord_m", "twist_deg"])?;
        Self::new(
            rows.iter().map(|r| r[0]).collect(),
            rows.iter().map(|r| r[1]).collect(),
            rows.iter().map(|r| r[2].to_radians()).collect(),
        )
    }
}

impl WingGeometry for TabulatedWing {
    fn semi_span(&self) -> f64 {
        self.semi_span
    }

    fn chord_at(&self, eta: f64) -> f64 {
        interp::lerp(&self.eta, &self.chord, eta.clamp(0.0, 1.0))
    }

    fn twist_at(&self, eta: f64) -> f64 {
        interp::lerp(&self.eta, &self.twist, eta.clamp(0.0, 1.0))
    }

    fn area(&self) -> f64 {
        self.area
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plain(chord: [f64; 4], semi_span: f64) -> WingPlanform {
        WingPlanform::new(semi_span, CubicBezier(chord), CubicBezier::constant(0.0), 0.0, 0.0).unwrap()
    }

    #[test]
    fn bezier_endpoints_and_constant() {
        let b = CubicBezier([0.4, -1.0, 7.0, 0.1]);
        assert_eq!(b.eval(0.0), 0.4);
        assert_eq!(b.eval(1.0), 0.1);
        let c = CubicBezier::constant(0.37);
        for i in 0..=10 {
            assert_relative_eq!(c.eval(i as f64 / 10.0), 0.37, max_relative = 1e-15);
        }
    }

    #[test]
    fn bezier_linear_polygon_midpoint() {
        // de Casteljau by hand: (0,1,2,3) -> (0.5,1.5,2.5) -> (1,2) -> 1.5
        assert_eq!(CubicBezier([0.0, 1.0, 2.0, 3.0]).eval(0.5), 1.5);
    }

    #[test]
    fn eval_outside_unit_interval_is_domain_error() {
        let p = plain([0.3; 4], 0.8);
        assert!(matches!(p.eval_chord(1.1), Err(Error::Domain(_))));
        assert!(matches!(p.eval_twist(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn rectangle_area() {
        assert_relative_eq!(plain([0.3; 4], 0.8).wing_area(), 0.48, max_relative = 1e-15);
    }

    #[test]
    fn exact_mean_area() {
        assert_relative_eq!(plain([0.4, 0.3, 0.2, 0.1], 1.0).wing_area(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn negative_chord_rejected() {
        let err = WingPlanform::new(1.0, CubicBezier([0.2, -0.5, -0.5, 0.2]), CubicBezier::constant(0.0), 0.0, 0.0);
        assert!(matches!(err, Err(Error::Validation(_))));
        // negative control value but positive curve: accepted
        assert!(WingPlanform::new(1.0, CubicBezier([0.3, 0.3, -0.01, 0.3]), CubicBezier::constant(0.0), 0.0, 0.0).is_ok());
    }

    #[test]
    fn washout_control_values() {
        let spec = ControlWingSpec {
            span: 1.6,
            area: 0.479,
            root_chord: 0.4,
            tip_chord: 0.19875,
            washout: (-2.0f64).to_radians(),
            sweep_le: 0.0,
            alpha_geo: 0.0,
        };
        let w = control_wing(&spec).unwrap();
        let expect = [0.0, -2.0 / 3.0, -4.0 / 3.0, -2.0];
        for (got, want) in w.twist.0.iter().zip(expect) {
            assert_relative_eq!(got.to_degrees(), want, epsilon = 1e-12);
        }
        let flat = control_wing(&ControlWingSpec { washout: 0.0, ..spec }).unwrap();
        assert_eq!(flat.twist.0, [0.0; 4]);
    }

    #[test]
    fn inconsistent_trapezoid_rejected() {
        let spec = ControlWingSpec {
            span: 1.6,
            area: 0.479,
            root_chord: 0.5,
            tip_chord: 0.3,
            washout: 0.0,
            sweep_le: 0.0,
            alpha_geo: 0.0,
        };
        assert!(matches!(control_wing(&spec), Err(Error::Validation(_))));
    }

    #[test]
    fn linear_laws_reproduced() {
        let spec = ControlWingSpec {
            span: 1.6,
            area: 0.479,
            root_chord: 0.39705,
            tip_chord: 0.20170,
            washout: (-2.0f64).to_radians(),
            sweep_le: 0.0,
            alpha_geo: 0.0,
        };
        let w = control_wing(&spec).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let c = spec.root_chord + t * (spec.tip_chord - spec.root_chord);
            assert!((w.chord.eval(t) - c).abs() < 1e-12);
            assert!((w.twist.eval(t) - t * spec.washout).abs() < 1e-12);
        }
    }

    #[test]
    fn avion_trapezoid_from_mac() {
        let (root, tip) = trapezoid_from_mac(1.6, 0.479, 0.310).unwrap();
        let mean = 0.479 / 1.6;
        assert_relative_eq!(0.5 * (root + tip), mean, max_relative = 1e-12);
        assert_relative_eq!(mean, 0.299, epsilon = 5e-4);
        let w = plain(CubicBezier::linear(root, tip).0, 0.8);
        assert_relative_eq!(w.mac(), 0.310, max_relative = 1e-10);
        assert_relative_eq!(w.wing_area(), 0.479, max_relative = 1e-12);
        assert!(tip < root);
    }

    #[test]
    fn rectangular_mac_is_chord() {
        let (root, tip) = trapezoid_from_mac(1.6, 0.48, 0.3).unwrap();
        assert_relative_eq!(root, 0.3, max_relative = 1e-9);
        assert_relative_eq!(tip, 0.3, max_relative = 1e-9);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let w = WingPlanform::new(
            0.8,
            CubicBezier([0.39705, 0.31, 0.27, 0.2017]),
            CubicBezier([0.01, -0.02, 0.03, -0.04]),
            0.24,
            -0.039,
        )
        .unwrap();
        let csv = w.to_csv();
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), EXPORT_STATIONS + 1);
        assert_eq!(WingPlanform::from_csv(csv.as_bytes()).unwrap(), w);
        let tab = TabulatedWing::from_csv(csv.as_bytes()).unwrap();
        assert_relative_eq!(tab.area(), w.wing_area(), max_relative = 1e-4);
    }

    #[test]
    fn elliptic_area_matches_aspect_ratio() {
        let e = EllipticWing::with_aspect_ratio(0.8, 5.35);
        assert_relative_eq!(e.aspect_ratio(), 5.35, max_relative = 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bezier_stays_in_control_hull(c in proptest::array::uniform4(-2.0f64..2.0), t in 0.0f64..=1.0) {
                let v = CubicBezier(c).eval(t);
                let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }

            #[test]
            fn area_is_span_times_mean_chord(c in proptest::array::uniform4(0.05f64..0.6), s in 0.2f64..2.0) {
                let wing = plain(c, s);
                prop_assert!((wing.wing_area() - 2.0 * s * CubicBezier(c).mean()).abs() < 1e-12);
            }
        }
    }
}
