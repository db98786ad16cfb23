//! Propeller slipstream at the wing quarter-chord line.
//!
//! A [`SlipstreamProfile`] is either read from tabulated measurements or
//! synthesised from a blade-element-momentum solution of the propeller.
//! Profiles describe the starboard semi-span (`y ≥ 0`, root at 0); the wing
//! solver mirrors them onto the port side.

use std::io::Read;

use log::warn;

use crate::error::{Error, Result};
use crate::interp;
use crate::polar::{AerofoilPolar, LiftMode};
use crate::table;

const SPEED_OF_SOUND: f64 = 340.0;
const TIP_MACH_WARNING: f64 = 0.6;
const MIN_BEM_STATIONS: usize = 8;

/// Spanwise axial and vertical velocity increments behind the propeller.
#[derive(Debug, Clone, PartialEq)]
pub struct SlipstreamProfile {
    y: Vec<f64>,
    u_axial: Vec<f64>,
    w_down: Vec<f64>,
    station_x: f64,
}

/// Slipstream velocities at one spanwise station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlipSample {
    /// Axial increment added to the free stream, m/s.
    pub u: f64,
    /// Vertical velocity, positive downward, m/s.
    pub w: f64,
}

impl SlipstreamProfile {
    pub fn new(y: Vec<f64>, u_axial: Vec<f64>, w_down: Vec<f64>, station_x: f64) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::validation(format!(
                "slipstream profile needs at least 2 stations, got {}",
                y.len()
            )));
        }
        if u_axial.len() != y.len() || w_down.len() != y.len() {
            return Err(Error::validation("slipstream columns have different lengths"));
        }
        if !interp::is_strictly_increasing(&y) {
            return Err(Error::validation("slipstream stations must be strictly increasing in y"));
        }
        if y.iter().chain(&u_axial).chain(&w_down).any(|v| !v.is_finite()) {
            return Err(Error::validation("slipstream profile contains non-finite values"));
        }
        if !(station_x >= 0.0) {
            return Err(Error::validation("slipstream station must be at or behind the disc"));
        }
        Ok(Self {
            y,
            u_axial,
            w_down,
            station_x,
        })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn u_axial(&self) -> &[f64] {
        &self.u_axial
    }

    pub fn w_down(&self) -> &[f64] {
        &self.w_down
    }

    /// Streamwise sampling station in propeller diameters.
    pub fn station_x(&self) -> f64 {
        self.station_x
    }

    /// `[first, last]` station; velocities are zero outside it.
    pub fn extent(&self) -> [f64; 2] {
        [self.y[0], self.y[self.y.len() - 1]]
    }

    /// Piecewise-linear in `y`, exactly zero outside the extent.
    pub fn sample(&self, y: f64) -> SlipSample {
        let [lo, hi] = self.extent();
        if !(y >= lo && y <= hi) {
            return SlipSample { u: 0.0, w: 0.0 };
        }
        let i = interp::panel_index(&self.y, y);
        SlipSample {
            u: interp::lerp_on_panel(&self.y, &self.u_axial, i, y),
            w: interp::lerp_on_panel(&self.y, &self.w_down, i, y),
        }
    }

    /// Same profile with the swirl direction reversed.
    pub fn mirrored_rotation(&self) -> Self {
        Self {
            w_down: self.w_down.iter().map(|w| -w).collect(),
            ..self.clone()
        }
    }

    /// Slipstream CSV (`y_m,u_axial_mps,w_down_mps`).
    pub fn to_csv(&self) -> String {
        let mut out = format!("# station_x_diameters={}\n", self.station_x);
        table::write_rows(
            &mut out,
            "y_m,u_axial_mps,w_down_mps",
            (0..self.y.len()).map(|i| vec![self.y[i], self.u_axial[i], self.w_down[i]]),
        );
        out
    }
}

/// Free-function form of [`SlipstreamProfile::sample`].
pub fn sample_slipstream(profile: &SlipstreamProfile, y: f64) -> SlipSample {
    profile.sample(y)
}

/// Reads a slipstream CSV. A `# station_x_diameters=` comment sets the
/// streamwise station (default one diameter).
pub fn load_slipstream<R: Read>(mut source: R) -> Result<SlipstreamProfile> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
    let meta = table::metadata(&text);
    let station_x = table::metadata_f64(&meta, "station_x_diameters")?.unwrap_or(1.0);
    let rows = table::read_table(text.as_bytes(), &["y_m", "u_axial_mps", "w_down_mps"])?;
    SlipstreamProfile::new(
        rows.iter().map(|r| r[0]).collect(),
        rows.iter().map(|r| r[1]).collect(),
        rows.iter().map(|r| r[2]).collect(),
        station_x,
    )
}

pub fn load_slipstream_file(path: &std::path::Path) -> Result<SlipstreamProfile> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_slipstream(file)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropellerGeometry {
    pub diameter: f64,
    pub hub_radius: f64,
    pub n_blades: usize,
    pub r_stations: Vec<f64>,
    pub chord: Vec<f64>,
    /// Blade pitch angle (rad) measured from the rotor plane.
    pub twist: Vec<f64>,
    /// Section polar shared by all stations.
    pub section_polar: AerofoilPolar,
}

impl PropellerGeometry {
    pub fn new(
        diameter: f64,
        hub_radius: f64,
        n_blades: usize,
        r_stations: Vec<f64>,
        chord: Vec<f64>,
        twist: Vec<f64>,
        section_polar: AerofoilPolar,
    ) -> Result<Self> {
        let tip = 0.5 * diameter;
        if !(diameter > 0.0) || !(hub_radius >= 0.0 && hub_radius < tip) {
            return Err(Error::validation(format!(
                "propeller needs 0 ≤ hub radius ({hub_radius}) < D/2 ({tip})"
            )));
        }
        if n_blades == 0 {
            return Err(Error::validation("propeller needs at least one blade"));
        }
        if r_stations.len() < 2 || chord.len() != r_stations.len() || twist.len() != r_stations.len() {
            return Err(Error::validation("blade tables must have equal length ≥ 2"));
        }
        if !interp::is_strictly_increasing(&r_stations)
            || r_stations[0] <= hub_radius
            || r_stations[r_stations.len() - 1] > tip * (1.0 + 1e-12)
        {
            return Err(Error::validation("blade stations must increase within (hub radius, D/2]"));
        }
        if chord.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::validation("blade chords must be positive"));
        }
        Ok(Self {
            diameter,
            hub_radius,
            n_blades,
            r_stations,
            chord,
            twist,
            section_polar,
        })
    }

    pub fn tip_radius(&self) -> f64 {
        0.5 * self.diameter
    }

    /// Same blade with `n` uniformly spaced stations over the original
    /// radial extent; chord and twist are interpolated linearly.
    pub fn resampled(&self, n: usize) -> Result<Self> {
        let n = n.max(2);
        let (r0, r1) = (self.r_stations[0], self.r_stations[self.r_stations.len() - 1]);
        let r: Vec<f64> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    r1
                } else {
                    r0 + (r1 - r0) * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        let chord = r.iter().map(|&x| interp::lerp(&self.r_stations, &self.chord, x)).collect();
        let twist = r.iter().map(|&x| interp::lerp(&self.r_stations, &self.twist, x)).collect();
        Self::new(
            self.diameter,
            self.hub_radius,
            self.n_blades,
            r,
            chord,
            twist,
            self.section_polar.clone(),
        )
    }
}

/// Reads a blade table (`r_m,chord_m,twist_deg`) with `# diameter_m=`,
/// `# hub_radius_m=` and `# n_blades=` metadata lines.
pub fn load_propeller_geometry<R: Read>(mut source: R, section_polar: AerofoilPolar) -> Result<PropellerGeometry> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
    let meta = table::metadata(&text);
    let need = |key: &str| -> Result<f64> {
        table::metadata_f64(&meta, key)?
            .ok_or_else(|| Error::validation(format!("propeller file lacks `# {key}=` metadata")))
    };
    let diameter = need("diameter_m")?;
    let hub = need("hub_radius_m")?;
    let blades = need("n_blades")?;
    if blades.fract() != 0.0 || blades < 1.0 {
        return Err(Error::validation(format!("n_blades = {blades} is not a positive integer")));
    }
    let rows = table::read_table(text.as_bytes(), &["r_m", "chord_m", "twist_deg"])?;
    PropellerGeometry::new(
        diameter,
        hub,
        blades as usize,
        rows.iter().map(|r| r[0]).collect(),
        rows.iter().map(|r| r[1]).collect(),
        rows.iter().map(|r| r[2].to_radians()).collect(),
        section_polar,
    )
}

pub fn load_propeller_file(path: &std::path::Path, section_polar: AerofoilPolar) -> Result<PropellerGeometry> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_propeller_geometry(file, section_polar)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropOperatingPoint {
    pub v_inf: f64,
    /// Shaft speed, revolutions per second.
    pub n_rps: f64,
    pub rho: f64,
}

impl PropOperatingPoint {
    pub fn new(v_inf: f64, n_rps: f64, rho: f64) -> Result<Self> {
        if !(n_rps > 0.0) {
            return Err(Error::validation(format!("rotation rate {n_rps} rps must be positive")));
        }
        if !(rho > 0.0) {
            return Err(Error::validation(format!("density {rho} must be positive")));
        }
        if !(v_inf >= 0.0) {
            return Err(Error::validation(format!("free-stream speed {v_inf} must be non-negative")));
        }
        Ok(Self { v_inf, n_rps, rho })
    }

    pub fn from_rpm(v_inf: f64, rpm: f64, rho: f64) -> Result<Self> {
        Self::new(v_inf, rpm / 60.0, rho)
    }

    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.n_rps
    }
}

/// `J = V∞ / (n D)`.
pub fn advance_ratio(op: &PropOperatingPoint, geom: &PropellerGeometry) -> f64 {
    op.v_inf / (op.n_rps * geom.diameter)
}

/// `CT = T / (ρ n² D⁴)`.
pub fn thrust_coefficient(thrust: f64, op: &PropOperatingPoint, geom: &PropellerGeometry) -> f64 {
    thrust / (op.rho * op.n_rps.powi(2) * geom.diameter.powi(4))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BemSettings {
    pub relaxation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BemSettings {
    fn default() -> Self {
        Self {
            relaxation: 0.3,
            tolerance: 1e-8,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BemSolution {
    pub r: Vec<f64>,
    /// Axial induction factor at the disc, averaged over the annulus.
    pub a_axial: Vec<f64>,
    /// Tangential induction factor at the disc, averaged over the annulus.
    pub a_tangential: Vec<f64>,
    /// Thrust per unit radius, all blades, N/m.
    pub dthrust_dr: Vec<f64>,
    pub thrust: f64,
    pub torque: f64,
    pub v_inf: f64,
    pub omega: f64,
    pub warnings: Vec<String>,
}

impl BemSolution {
    pub fn thrust_coefficient(&self, op: &PropOperatingPoint, geom: &PropellerGeometry) -> f64 {
        thrust_coefficient(self.thrust, op, geom)
    }
}

pub fn run_bem(geom: &PropellerGeometry, op: &PropOperatingPoint) -> Result<BemSolution> {
    run_bem_with(geom, op, &BemSettings::default())
}

/// Blade-element momentum solution with Prandtl tip loss.
///
/// Each station iterates its blade-local axial (`a`) and swirl (`a'`)
/// induction factors to a fixed point of the annulus momentum balance
/// `a (1 + a) = σ Cn W² / (4 F V²)`, `a' = σ Ct W² / (4 F V (1 + a) Ω r)`.
/// The solution reports the annulus means `a F` and `a' F`.
pub fn run_bem_with(geom: &PropellerGeometry, op: &PropOperatingPoint, settings: &BemSettings) -> Result<BemSolution> {
    if geom.r_stations.len() < MIN_BEM_STATIONS {
        return Err(Error::validation(format!(
            "blade-element solution needs at least {MIN_BEM_STATIONS} stations, got {}",
            geom.r_stations.len()
        )));
    }
    if !(op.v_inf > 0.0) {
        return Err(Error::validation(
            "blade-element solution needs forward speed; static thrust is not modelled",
        ));
    }
    let v = op.v_inf;
    let omega = op.omega();
    let tip = geom.tip_radius();
    let blades = geom.n_blades as f64;

    let mut warnings = Vec::new();
    let tip_mach = (omega * tip).hypot(v) / SPEED_OF_SOUND;
    if tip_mach > TIP_MACH_WARNING {
        let msg = format!("tip Mach number {tip_mach:.2} exceeds {TIP_MACH_WARNING}; compressibility is ignored");
        warn!("{msg}");
        warnings.push(msg);
    }

    let n = geom.r_stations.len();
    let mut a_axial = vec![0.0; n];
    let mut a_tan = vec![0.0; n];
    let mut dt = vec![0.0; n];
    let mut dq = vec![0.0; n];

    for i in 0..n {
        let r = geom.r_stations[i];
        let sigma = blades * geom.chord[i] / (2.0 * std::f64::consts::PI * r);
        let pitch = geom.twist[i];

        let loads = |a: f64, ap: f64| -> Result<(f64, f64, f64, f64)> {
            let va = v * (1.0 + a);
            let vt = omega * r * (1.0 - ap);
            let phi = va.atan2(vt);
            let w2 = va * va + vt * vt;
            let alpha = pitch - phi;
            let polar = &geom.section_polar;
            let cl = polar.cl_of_alpha(alpha, LiftMode::Tabulated)?;
            let cd = polar.cd_of_cl(cl);
            let cn = cl * phi.cos() - cd * phi.sin();
            let ct = cl * phi.sin() + cd * phi.cos();
            let f = tip_loss(geom.n_blades, r, tip, phi);
            Ok((w2, cn, ct, f))
        };

        let (mut a, mut ap) = (0.0_f64, 0.0_f64);
        let mut residual = f64::INFINITY;
        let mut iterations = 0;
        while residual > settings.tolerance {
            if iterations == settings.max_iterations {
                return Err(Error::Convergence {
                    msg: format!("induction at r = {r:.5} m did not converge in {iterations} iterations"),
                    residual,
                });
            }
            iterations += 1;
            let (w2, cn, ct, f) = loads(a, ap)?;
            if f < 1e-9 {
                // tip station carries no load
                a = 0.0;
                ap = 0.0;
                break;
            }
            let k = sigma * cn * w2 / (4.0 * f * v * v);
            let a_new = if 1.0 + 4.0 * k >= 0.0 {
                0.5 * (-1.0 + (1.0 + 4.0 * k).sqrt())
            } else {
                -0.5
            };
            let ap_new = sigma * ct * w2 / (4.0 * f * v * (1.0 + a) * omega * r);
            residual = (a_new - a).abs().max((ap_new - ap).abs());
            a += settings.relaxation * (a_new - a);
            ap += settings.relaxation * (ap_new - ap);
        }
        let (w2, cn, ct, f) = loads(a, ap)?;
        let (a_mean, ap_mean) = if f >= 1e-9 { (a * f, ap * f) } else { (0.0, 0.0) };
        if !(-0.5..1.0).contains(&a_mean) || !(-0.5..1.0).contains(&ap_mean) {
            return Err(Error::Convergence {
                msg: format!(
                    "annulus-mean induction a = {a_mean:.4}, a' = {ap_mean:.4} at r = {r:.5} m is outside [-0.5, 1)"
                ),
                residual,
            });
        }
        let per_span = 0.5 * op.rho * w2 * blades * geom.chord[i];
        if f >= 1e-9 {
            dt[i] = per_span * cn;
            dq[i] = per_span * ct * r;
        }
        a_axial[i] = a_mean;
        a_tan[i] = ap_mean;
    }

    Ok(BemSolution {
        thrust: interp::trapezoid(&geom.r_stations, &dt),
        torque: interp::trapezoid(&geom.r_stations, &dq),
        r: geom.r_stations.clone(),
        a_axial,
        a_tangential: a_tan,
        dthrust_dr: dt,
        v_inf: v,
        omega,
        warnings,
    })
}

/// Prandtl tip-loss factor.
fn tip_loss(blades: usize, r: f64, tip: f64, phi: f64) -> f64 {
    let s = phi.sin().abs();
    if s < 1e-12 {
        return 1.0;
    }
    let f = 0.5 * blades as f64 * (tip - r) / (r * s);
    (2.0 / std::f64::consts::PI) * (-f).exp().clamp(0.0, 1.0).acos()
}

/// `(J, CT)` over a set of forward speeds at fixed shaft speed.
pub fn ct_sweep(geom: &PropellerGeometry, n_rps: f64, rho: f64, speeds: &[f64]) -> Result<Vec<(f64, f64)>> {
    speeds
        .iter()
        .map(|&v| {
            let op = PropOperatingPoint::new(v, n_rps, rho)?;
            let bem = run_bem(geom, &op)?;
            Ok((advance_ratio(&op, geom), bem.thrust_coefficient(&op, geom)))
        })
        .collect()
}

/// Direction of blade travel on the inboard side of the disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationSense {
    UpInboard,
    UpOutboard,
}

impl std::str::FromStr for RotationSense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up_inboard" => Ok(Self::UpInboard),
            "up_outboard" => Ok(Self::UpOutboard),
            other => Err(Error::validation(format!(
                "rotation `{other}` is not `up_inboard` or `up_outboard`"
            ))),
        }
    }
}

impl std::fmt::Display for RotationSense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::UpInboard => "up_inboard",
            Self::UpOutboard => "up_outboard",
        })
    }
}

/// Where the propeller sits relative to the wing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropPlacement {
    /// Spanwise position of the propeller axis, m from the root.
    pub y_center: f64,
    pub semi_span: f64,
    pub rotation: RotationSense,
    /// Wing quarter-chord station behind the disc, in diameters.
    pub station_x: f64,
}

/// Growth of disc-induced velocities with distance behind the disc: 1 at
/// the disc, 2 from one diameter onward.
pub fn development_factor(station_x: f64) -> f64 {
    1.0 + station_x.clamp(0.0, 1.0)
}

/// Maps a BEM solution onto the wing line. Axial increments are
/// `f_dev a V∞`; swirl `f_dev a' Ω r` becomes vertical velocity on the
/// horizontal diameter of the disc, upward on the side the blades rise.
pub fn slipstream_from_bem(
    bem: &BemSolution,
    geom: &PropellerGeometry,
    placement: &PropPlacement,
) -> Result<SlipstreamProfile> {
    let tip = geom.tip_radius();
    let yc = placement.y_center;
    if yc - tip < 0.0 || yc + tip > placement.semi_span {
        return Err(Error::validation(format!(
            "propeller disc [{:.4}, {:.4}] m lies outside the semi-span [0, {}] m",
            yc - tip,
            yc + tip,
            placement.semi_span
        )));
    }
    let f = development_factor(placement.station_x);
    let u: Vec<f64> = bem.a_axial.iter().map(|a| f * a * bem.v_inf).collect();
    let vt: Vec<f64> = bem
        .a_tangential
        .iter()
        .zip(&bem.r)
        .map(|(ap, r)| f * ap * bem.omega * r)
        .collect();
    // Upward swirl inboard means negative (upwash) w_down for y < yc.
    let inboard_sign = match placement.rotation {
        RotationSense::UpInboard => -1.0,
        RotationSense::UpOutboard => 1.0,
    };

    let n = bem.r.len();
    let mut y = Vec::with_capacity(2 * n + 1);
    let mut ua = Vec::with_capacity(2 * n + 1);
    let mut wd = Vec::with_capacity(2 * n + 1);
    for i in (0..n).rev() {
        y.push(yc - bem.r[i]);
        ua.push(u[i]);
        wd.push(inboard_sign * vt[i]);
    }
    y.push(yc);
    ua.push(u[0]);
    wd.push(0.0);
    for i in 0..n {
        y.push(yc + bem.r[i]);
        ua.push(u[i]);
        wd.push(-inboard_sign * vt[i]);
    }
    SlipstreamProfile::new(y, ua, wd, placement.station_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flat_plate_polar() -> AerofoilPolar {
        let rows: Vec<(f64, f64, f64)> = (-20..=20)
            .map(|a| {
                let a = a as f64;
                (a, 2.0 * std::f64::consts::PI * a.to_radians(), 0.01)
            })
            .collect();
        AerofoilPolar::from_rows("plate", 1e5, &rows).unwrap()
    }

    fn test_blade(polar: AerofoilPolar, stations: usize) -> PropellerGeometry {
        let d = 0.2286;
        let tip = 0.5 * d;
        let hub = 0.25 * tip;
        let pitch = 0.17145;
        let r: Vec<f64> = (1..=stations)
            .map(|i| hub + (tip - hub) * i as f64 / stations as f64)
            .collect();
        let twist = r.iter().map(|x| (pitch / (2.0 * std::f64::consts::PI * x)).atan()).collect();
        PropellerGeometry::new(d, hub, 2, r.clone(), vec![0.0171; stations], twist, polar).unwrap()
    }

    #[test]
    fn advance_ratio_sweep_end_points() {
        let geom = test_blade(flat_plate_polar(), 10);
        let slow = PropOperatingPoint::new(3.8, 83.3, 1.225).unwrap();
        let fast = PropOperatingPoint::new(17.15, 83.3, 1.225).unwrap();
        let rest = PropOperatingPoint::new(0.0, 83.3, 1.225).unwrap();
        assert_relative_eq!(advance_ratio(&slow, &geom), 0.1995, epsilon = 5e-4);
        assert_relative_eq!(advance_ratio(&fast, &geom), 0.90, epsilon = 5e-3);
        assert_eq!(advance_ratio(&rest, &geom), 0.0);
    }

    #[test]
    fn thrust_coefficient_formula() {
        let mut geom = test_blade(flat_plate_polar(), 10);
        geom.diameter = 0.25;
        let op = PropOperatingPoint::new(10.0, 100.0, 1.225).unwrap();
        assert_relative_eq!(thrust_coefficient(1.0, &op, &geom), 0.020_898, epsilon = 1e-6);
        assert_eq!(thrust_coefficient(0.0, &op, &geom), 0.0);
    }

    #[test]
    fn operating_point_validation() {
        assert!(PropOperatingPoint::new(10.0, 0.0, 1.2).is_err());
        assert!(PropOperatingPoint::new(10.0, 10.0, 0.0).is_err());
        assert!(PropOperatingPoint::new(-1.0, 10.0, 1.2).is_err());
    }

    #[test]
    fn zero_lift_sections_only_drag() {
        let rows: Vec<(f64, f64, f64)> = (-10..=10).map(|a| (a as f64 * 3.0, 0.0, 0.02)).collect();
        let polar = AerofoilPolar::from_rows("nolift", 1e5, &rows).unwrap();
        let geom = test_blade(polar, 12);
        let op = PropOperatingPoint::from_rpm(8.0, 5000.0, 1.225).unwrap();
        let bem = run_bem(&geom, &op).unwrap();
        assert!(bem.thrust <= 0.0, "thrust {}", bem.thrust);
        assert!(bem.torque > 0.0);
    }

    #[test]
    fn induction_bounded_and_thrust_positive() {
        let geom = test_blade(flat_plate_polar(), 16);
        let op = PropOperatingPoint::from_rpm(5.0, 5000.0, 1.225).unwrap();
        let bem = run_bem(&geom, &op).unwrap();
        assert!(bem.thrust > 0.0);
        for (&a, &ap) in bem.a_axial.iter().zip(&bem.a_tangential) {
            assert!((-0.5..1.0).contains(&a));
            assert!((-0.5..1.0).contains(&ap));
        }
    }

    #[test]
    fn static_case_rejected() {
        let geom = test_blade(flat_plate_polar(), 10);
        let op = PropOperatingPoint::new(0.0, 83.3, 1.225).unwrap();
        assert!(matches!(run_bem(&geom, &op), Err(Error::Validation(_))));
    }

    #[test]
    fn too_few_stations_rejected() {
        let geom = test_blade(flat_plate_polar(), 5);
        let op = PropOperatingPoint::new(5.0, 83.3, 1.225).unwrap();
        assert!(matches!(run_bem(&geom, &op), Err(Error::Validation(_))));
    }

    #[test]
    fn tip_mach_warning() {
        let geom = test_blade(flat_plate_polar(), 10);
        let op = PropOperatingPoint::from_rpm(40.0, 40000.0, 1.225).unwrap();
        if let Ok(bem) = run_bem(&geom, &op) {
            assert!(!bem.warnings.is_empty());
        }
    }

    fn placement(rotation: RotationSense) -> PropPlacement {
        PropPlacement {
            y_center: 0.24,
            semi_span: 0.8,
            rotation,
            station_x: 1.0,
        }
    }

    #[test]
    fn upwash_inboard_downwash_outboard() {
        let geom = test_blade(flat_plate_polar(), 16);
        let op = PropOperatingPoint::from_rpm(5.0, 5000.0, 1.225).unwrap();
        let bem = run_bem(&geom, &op).unwrap();
        let p = slipstream_from_bem(&bem, &geom, &placement(RotationSense::UpInboard)).unwrap();
        for (&y, &w) in p.y().iter().zip(p.w_down()) {
            if y < 0.24 - 1e-12 && w != 0.0 {
                assert!(w < 0.0, "inboard w = {w} at y = {y}");
            }
            if y > 0.24 + 1e-12 && w != 0.0 {
                assert!(w > 0.0, "outboard w = {w} at y = {y}");
            }
        }
        assert!(p.sample(0.24 - 0.05).w < 0.0);
        assert!(p.sample(0.24 + 0.05).w > 0.0);

        let q = slipstream_from_bem(&bem, &geom, &placement(RotationSense::UpOutboard)).unwrap();
        assert_eq!(q.u_axial(), p.u_axial());
        for (a, b) in q.w_down().iter().zip(p.w_down()) {
            assert_eq!(*a, -*b);
        }
        assert_eq!(q, p.mirrored_rotation());

        // swirl integrates to zero across the disc
        let w_int = interp::trapezoid(p.y(), p.w_down());
        let w_abs: Vec<f64> = p.w_down().iter().map(|w| w.abs()).collect();
        assert!(w_int.abs() <= 1e-9 * interp::trapezoid(p.y(), &w_abs));
    }

    #[test]
    fn zero_induction_gives_zero_profile() {
        let geom = test_blade(flat_plate_polar(), 10);
        let bem = BemSolution {
            r: geom.r_stations.clone(),
            a_axial: vec![0.0; 10],
            a_tangential: vec![0.0; 10],
            dthrust_dr: vec![0.0; 10],
            thrust: 0.0,
            torque: 0.0,
            v_inf: 15.0,
            omega: 600.0,
            warnings: vec![],
        };
        let p = slipstream_from_bem(&bem, &geom, &placement(RotationSense::UpInboard)).unwrap();
        assert!(p.u_axial().iter().chain(p.w_down()).all(|v| *v == 0.0));
    }

    #[test]
    fn disc_outside_span_rejected() {
        let geom = test_blade(flat_plate_polar(), 10);
        let op = PropOperatingPoint::from_rpm(5.0, 5000.0, 1.225).unwrap();
        let bem = run_bem(&geom, &op).unwrap();
        let mut p = placement(RotationSense::UpInboard);
        p.y_center = 0.05;
        assert!(matches!(slipstream_from_bem(&bem, &geom, &p), Err(Error::Validation(_))));
    }

    #[test]
    fn development_factor_ramp() {
        assert_eq!(development_factor(0.0), 1.0);
        assert_eq!(development_factor(0.5), 1.5);
        assert_eq!(development_factor(1.0), 2.0);
        assert_eq!(development_factor(3.0), 2.0);
    }

    #[test]
    fn sampling_rules() {
        let p = SlipstreamProfile::new(vec![0.1, 0.2, 0.3], vec![1.0, 3.0, 1.0], vec![-1.0, 0.0, 2.0], 1.0).unwrap();
        assert_eq!(p.sample(0.35), SlipSample { u: 0.0, w: 0.0 });
        assert_eq!(p.sample(0.05), SlipSample { u: 0.0, w: 0.0 });
        assert_eq!(p.sample(0.2), SlipSample { u: 3.0, w: 0.0 });
        let mid = p.sample(0.25);
        assert_relative_eq!(mid.u, 2.0, epsilon = 1e-14);
        assert_relative_eq!(mid.w, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn single_row_and_empty_columns_rejected() {
        let one = "y_m,u_axial_mps,w_down_mps\n0.2,1.0,0.0\n";
        assert!(matches!(load_slipstream(one.as_bytes()), Err(Error::Validation(_))));
        let empty = "y_m,u_axial_mps,w_down_mps\n0.1,,\n0.2,,\n";
        assert!(matches!(load_slipstream(empty.as_bytes()), Err(Error::Validation(_))));
    }

    #[test]
    fn csv_round_trip_bit_identical() {
        let y: Vec<f64> = (0..20).map(|i| 0.1 + 0.0147 * i as f64).collect();
        let u: Vec<f64> = y.iter().map(|v| (v * 17.0).sin() * 3.3).collect();
        let w: Vec<f64> = y.iter().map(|v| (v * 5.0).cos() / 3.0).collect();
        let p = SlipstreamProfile::new(y, u, w, 0.823).unwrap();
        let text = p.to_csv();
        let back = load_slipstream(text.as_bytes()).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn geometry_file_metadata() {
        let src = "# diameter_m=0.2286\n# hub_radius_m=0.02\n# n_blades=2\nr_m,chord_m,twist_deg\n0.03,0.02,40\n0.06,0.02,25\n0.1143,0.015,14\n";
        let g = load_propeller_geometry(src.as_bytes(), flat_plate_polar()).unwrap();
        assert_eq!(g.n_blades, 2);
        assert_relative_eq!(g.twist[1], 25f64.to_radians());
        let missing = "# diameter_m=0.2286\nr_m,chord_m,twist_deg\n0.03,0.02,40\n0.06,0.02,25\n";
        assert!(matches!(load_propeller_geometry(missing.as_bytes(), flat_plate_polar()), Err(Error::Validation(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn induction_in_range_over_advance_ratio(v in 4.0f64..16.0, rpm in 4000.0f64..7000.0) {
                let geom = test_blade(flat_plate_polar(), 12);
                let op = PropOperatingPoint::from_rpm(v, rpm, 1.225).unwrap();
                let bem = run_bem(&geom, &op).unwrap();
                for (&a, &ap) in bem.a_axial.iter().zip(&bem.a_tangential) {
                    prop_assert!((-0.5..1.0).contains(&a));
                    prop_assert!(ap.abs() < 1.0);
                }
                prop_assert!(bem.thrust.is_finite() && bem.torque.is_finite());
            }
        }
    }
}
