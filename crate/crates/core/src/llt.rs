//! Lifting-line solver with propeller slipstream.
//!
//! Circulation is a Fourier sine series over the full span,
//! `Γ(θ) = 2 b V∞ Σ A_n sin nθ` with `y = -s cos θ`. At each collocation
//! station the circulation must match `½ V(y) c(y) cl(y)` where `cl` comes
//! from the section's linear lift model and the effective incidence loses
//! both the wing's own downwash and the propeller swirl angle. With linear
//! lift the collocation equations are linear in `A_n`; they are solved in
//! the least-squares sense by QR.
//!
//! Coefficients are formed without density, so they are exactly invariant
//! to `ρ`; dimensional forces scale by `½ ρ V∞² S`.

use std::f64::consts::PI;

use log::debug;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::planform::WingGeometry;
use crate::polar::{AerofoilPolar, LinearLiftModel};
use crate::slipstream::SlipstreamProfile;
use crate::table;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightCondition {
    pub v_inf: f64,
    pub rho: f64,
    /// Geometric angle of attack of the root section, rad.
    pub alpha_geo: f64,
    pub reynolds_ref: f64,
}

impl FlightCondition {
    pub fn new(v_inf: f64, rho: f64, alpha_geo: f64, reynolds_ref: f64) -> Result<Self> {
        if !(v_inf > 0.0 && v_inf.is_finite()) {
            return Err(Error::validation(format!("free-stream speed {v_inf} must be positive")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::validation(format!("density {rho} must be positive")));
        }
        if !alpha_geo.is_finite() {
            return Err(Error::validation("angle of attack is not finite"));
        }
        Ok(Self {
            v_inf,
            rho,
            alpha_geo,
            reynolds_ref,
        })
    }

    pub fn with_alpha(&self, alpha_geo: f64) -> Self {
        Self { alpha_geo, ..*self }
    }

    pub fn dynamic_pressure(&self) -> f64 {
        0.5 * self.rho * self.v_inf * self.v_inf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LltSettings {
    pub n_collocation: usize,
    pub n_modes: usize,
}

impl Default for LltSettings {
    fn default() -> Self {
        Self {
            n_collocation: 320,
            n_modes: 48,
        }
    }
}

impl LltSettings {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 || self.n_modes > self.n_collocation {
            return Err(Error::validation(format!(
                "need 1 ≤ n_modes ({}) ≤ n_collocation ({})",
                self.n_modes, self.n_collocation
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LltSolution {
    pub theta: Vec<f64>,
    pub y: Vec<f64>,
    pub chord: Vec<f64>,
    pub twist: Vec<f64>,
    /// Fourier coefficients `A_1 .. A_N`.
    pub a_n: Vec<f64>,
    pub gamma: Vec<f64>,
    pub alpha_eff: Vec<f64>,
    pub alpha_downwash: Vec<f64>,
    pub alpha_prop: Vec<f64>,
    /// Local onset speed including slipstream, m/s.
    pub v_local: Vec<f64>,
    pub cl_span: Vec<f64>,
    pub cd_span: Vec<f64>,
    pub alpha_geo: f64,
    pub v_inf: f64,
    pub semi_span: f64,
    pub area: f64,
    pub cl: f64,
    pub cdi: f64,
    pub cf: f64,
    pub cd: f64,
    pub endurance: f64,
    /// RMS residual of the collocation equations.
    pub residual: f64,
    pub warnings: Vec<String>,
}

impl LltSolution {
    /// Spanwise CSV; the last column is `Γ / (V∞ s)`.
    pub fn spanwise_csv(&self) -> String {
        let mut out = String::new();
        let scale = 1.0 / (self.v_inf * self.semi_span);
        table::write_rows(
            &mut out,
            "y_m,chord_m,twist_deg,alpha_eff_deg,cl,cd,gamma_m2ps,gamma_over_vinf_s",
            (0..self.y.len()).map(|k| {
                vec![
                    self.y[k],
                    self.chord[k],
                    self.twist[k].to_degrees(),
                    self.alpha_eff[k].to_degrees(),
                    self.cl_span[k],
                    self.cd_span[k],
                    self.gamma[k],
                    self.gamma[k] * scale,
                ]
            }),
        );
        out
    }

    pub fn lift(&self, cond: &FlightCondition) -> f64 {
        self.cl * cond.dynamic_pressure() * self.area
    }

    pub fn drag(&self, cond: &FlightCondition) -> f64 {
        self.cd * cond.dynamic_pressure() * self.area
    }
}

/// Collocation grid and Fourier tables for one resolution.
#[derive(Debug, Clone)]
pub struct LltSolver {
    settings: LltSettings,
    theta: Vec<f64>,
    sin_theta: Vec<f64>,
    /// `sin nθ_k`, collocation × modes.
    sin_n: DMatrix<f64>,
    /// `n sin nθ_k / sin θ_k`.
    dw_n: DMatrix<f64>,
}

impl LltSolver {
    pub fn new(settings: LltSettings) -> Result<Self> {
        settings.validate()?;
        let (n, m) = (settings.n_collocation, settings.n_modes);
        let theta: Vec<f64> = (1..=n).map(|k| k as f64 * PI / (n + 1) as f64).collect();
        let sin_theta: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
        let sin_n = DMatrix::from_fn(n, m, |k, j| ((j + 1) as f64 * theta[k]).sin());
        let dw_n = DMatrix::from_fn(n, m, |k, j| (j + 1) as f64 * sin_n[(k, j)] / sin_theta[k]);
        Ok(Self {
            settings,
            theta,
            sin_theta,
            sin_n,
            dw_n,
        })
    }

    pub fn settings(&self) -> LltSettings {
        self.settings
    }

    /// Evaluates geometry and slipstream at the collocation stations and
    /// factors the collocation matrix. Angle of attack and twist enter only
    /// the right-hand side, so the result can be re-solved cheaply.
    pub fn prepare<'a>(
        &'a self,
        wing: &dyn WingGeometry,
        polar: &'a AerofoilPolar,
        slip: Option<&SlipstreamProfile>,
        cond: &FlightCondition,
    ) -> Result<PreparedWing<'a>> {
        let s = wing.semi_span();
        let area = wing.area();
        if !(s > 0.0 && area > 0.0) {
            return Err(Error::validation("wing span and area must be positive"));
        }
        let lift = *polar.blf().ok_or_else(|| {
            Error::validation(format!("polar `{}` needs a linear lift fit before solving", polar.name()))
        })?;
        if let Some(p) = slip {
            let [lo, hi] = p.extent();
            if lo < 0.0 || hi > s * (1.0 + 1e-12) {
                return Err(Error::validation(format!(
                    "slipstream extent [{lo}, {hi}] m exceeds semi-span [0, {s}] m"
                )));
            }
        }
        let b = 2.0 * s;
        let v_inf = cond.v_inf;
        let n = self.theta.len();
        let mut st = Stations::with_capacity(n);
        for k in 0..n {
            let y = -s * self.theta[k].cos();
            let eta = (y.abs() / s).min(1.0);
            let chord = wing.chord_at(eta);
            if !(chord >= 0.0 && chord.is_finite()) {
                return Err(Error::validation(format!("chord {chord} at y = {y} m is invalid")));
            }
            let (u, w) = slip.map_or((0.0, 0.0), |p| {
                let v = p.sample(y.abs());
                (v.u, v.w)
            });
            let axial = v_inf + u;
            if !(axial > 0.0) {
                return Err(Error::validation(format!("reversed axial flow at y = {y} m")));
            }
            st.y.push(y);
            st.eta.push(eta);
            st.chord.push(chord);
            st.twist.push(wing.twist_at(eta));
            st.axial.push(axial);
            st.v_local.push(axial.hypot(w));
            st.alpha_prop.push(w.atan2(axial));
        }
        let mu: Vec<f64> = (0..n)
            .map(|k| st.chord[k] * lift.a0 * st.v_local[k] / (4.0 * b * v_inf))
            .collect();
        let mut matrix = self.sin_n.clone();
        for k in 0..n {
            for j in 0..self.settings.n_modes {
                matrix[(k, j)] += mu[k] * self.dw_n[(k, j)];
            }
        }
        let qr = matrix.clone().qr();
        let r = qr.r();
        let scale = r.diagonal().iter().fold(0.0_f64, |a, d| a.max(d.abs()));
        if !(scale > 0.0) || r.diagonal().iter().any(|d| d.abs() <= 1e-13 * scale) {
            return Err(Error::Solver("collocation matrix is singular".into()));
        }
        Ok(PreparedWing {
            solver: self,
            polar,
            lift,
            semi_span: s,
            area,
            v_inf,
            stations: st,
            mu,
            matrix,
            q_t: qr.q().transpose(),
            r,
            tip_chord: wing.chord_at(1.0),
        })
    }
}

#[derive(Debug, Clone)]
struct Stations {
    y: Vec<f64>,
    eta: Vec<f64>,
    chord: Vec<f64>,
    twist: Vec<f64>,
    axial: Vec<f64>,
    v_local: Vec<f64>,
    alpha_prop: Vec<f64>,
}

impl Stations {
    fn with_capacity(n: usize) -> Self {
        Self {
            y: Vec::with_capacity(n),
            eta: Vec::with_capacity(n),
            chord: Vec::with_capacity(n),
            twist: Vec::with_capacity(n),
            axial: Vec::with_capacity(n),
            v_local: Vec::with_capacity(n),
            alpha_prop: Vec::with_capacity(n),
        }
    }
}

/// A factored collocation system for fixed chord, slipstream and speed.
#[derive(Debug, Clone)]
pub struct PreparedWing<'a> {
    solver: &'a LltSolver,
    polar: &'a AerofoilPolar,
    lift: LinearLiftModel,
    semi_span: f64,
    area: f64,
    v_inf: f64,
    stations: Stations,
    mu: Vec<f64>,
    matrix: DMatrix<f64>,
    q_t: DMatrix<f64>,
    r: DMatrix<f64>,
    tip_chord: f64,
}

impl PreparedWing<'_> {
    /// Normalised spanwise position `|y| / s` of each collocation station.
    pub fn eta(&self) -> &[f64] {
        &self.stations.eta
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Solves with the wing's own twist.
    pub fn solve(&self, alpha_geo: f64) -> Result<LltSolution> {
        self.solve_with_twist(&self.stations.twist, alpha_geo)
    }

    /// Solves with twist (rad) given per collocation station.
    pub fn solve_with_twist(&self, twist: &[f64], alpha_geo: f64) -> Result<LltSolution> {
        let st = &self.stations;
        let n = st.y.len();
        if twist.len() != n {
            return Err(Error::validation(format!("twist has {} stations, expected {n}", twist.len())));
        }
        let incidence: Vec<f64> = (0..n)
            .map(|k| alpha_geo + twist[k] - st.alpha_prop[k] - self.lift.alpha0)
            .collect();
        let rhs = DVector::from_fn(n, |k, _| self.mu[k] * incidence[k]);
        let qtb = &self.q_t * &rhs;
        let a = self
            .r
            .solve_upper_triangular(&qtb)
            .ok_or_else(|| Error::Solver("collocation matrix is singular".into()))?;
        let residual = ((&self.matrix * &a - &rhs).norm_squared() / n as f64).sqrt();
        if !residual.is_finite() || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("lifting-line solution is not finite".into()));
        }

        let solver = self.solver;
        let s = self.semi_span;
        let b = 2.0 * s;
        let v_inf = self.v_inf;
        let series = &solver.sin_n * &a;
        let downwash = &solver.dw_n * &a;
        let gamma: Vec<f64> = series.iter().map(|g| 2.0 * b * v_inf * g).collect();
        let alpha_downwash: Vec<f64> = downwash.iter().copied().collect();
        let alpha_eff: Vec<f64> = (0..n)
            .map(|k| alpha_geo + twist[k] - alpha_downwash[k] - st.alpha_prop[k])
            .collect();
        let cl_span: Vec<f64> = (0..n)
            .map(|k| {
                if st.chord[k] > 0.0 {
                    2.0 * gamma[k] / (st.v_local[k] * st.chord[k])
                } else {
                    0.0
                }
            })
            .collect();
        let cd_span: Vec<f64> = cl_span.iter().map(|&c| self.polar.cd_of_cl(c)).collect();

        // θ-trapezoid: ∫ f dy = ∫ f s sinθ dθ with zero end contributions.
        let dtheta = PI / (n + 1) as f64;
        let norm = v_inf * v_inf * self.area;
        let mut lift = 0.0;
        let mut induced = 0.0;
        for k in 0..n {
            let w = s * solver.sin_theta[k] * dtheta;
            lift += st.axial[k] * gamma[k] * w;
            induced += gamma[k] * v_inf * alpha_downwash[k] * w;
        }
        let cl = 2.0 * lift / norm;
        let cdi = 2.0 * induced / norm;
        let cf = self.profile_drag(&cd_span);
        let cd = cdi + cf;

        let mut warnings = Vec::new();
        let lower = self.lift.fit_window_deg[0].to_radians();
        let below = alpha_eff.iter().filter(|a| **a < lower).count();
        if below > 0 {
            let msg = format!(
                "{below} of {n} stations have effective incidence below the linear-lift window ({}°)",
                self.lift.fit_window_deg[0]
            );
            debug!("{msg}");
            warnings.push(msg);
        }

        Ok(LltSolution {
            theta: solver.theta.clone(),
            y: st.y.clone(),
            chord: st.chord.clone(),
            twist: twist.to_vec(),
            a_n: a.iter().copied().collect(),
            gamma,
            alpha_eff,
            alpha_downwash,
            alpha_prop: st.alpha_prop.clone(),
            v_local: st.v_local.clone(),
            cl_span,
            cd_span,
            alpha_geo,
            v_inf,
            semi_span: s,
            area: self.area,
            cl,
            cdi,
            cf,
            cd,
            endurance: cl / cd,
            residual,
            warnings,
        })
    }

    /// `∫ V² cd c dy / (V∞² S)` by the trapezoidal rule over the stations
    /// and both tips, where the section carries no lift.
    fn profile_drag(&self, cd: &[f64]) -> f64 {
        let st = &self.stations;
        let n = st.y.len();
        let tip_cd = self.polar.cd_of_cl(0.0);
        let v2 = self.v_inf * self.v_inf;
        let f = |k: usize| st.v_local[k] * st.v_local[k] * cd[k] * st.chord[k];
        let s = self.semi_span;
        let f_tip = v2 * tip_cd * self.tip_chord;
        let mut sum = 0.5 * (st.y[0] + s) * (f_tip + f(0));
        for k in 1..n {
            sum += 0.5 * (st.y[k] - st.y[k - 1]) * (f(k - 1) + f(k));
        }
        sum += 0.5 * (s - st.y[n - 1]) * (f(n - 1) + f_tip);
        sum / (v2 * self.area)
    }

    /// Angle of attack giving lift coefficient `cl_target`. Lift is affine
    /// in the angle of attack, so two solves determine it exactly.
    pub fn trim_alpha(&self, twist: &[f64], cl_target: f64) -> Result<(f64, LltSolution)> {
        let base = self.solve_with_twist(twist, 0.0)?;
        let probe = self.solve_with_twist(twist, 0.1)?;
        let slope = (probe.cl - base.cl) / 0.1;
        if !(slope.abs() > 1e-12) {
            return Err(Error::Solver("lift does not respond to angle of attack".into()));
        }
        let alpha = (cl_target - base.cl) / slope;
        let sol = self.solve_with_twist(twist, alpha)?;
        Ok((alpha, sol))
    }

    /// Twist per station for a twist law evaluated at `eta`.
    pub fn twist_from(&self, law: impl Fn(f64) -> f64) -> Vec<f64> {
        self.stations.eta.iter().map(|&e| law(e)).collect()
    }
}

/// One-shot solve at `cond.alpha_geo`.
pub fn solve(
    wing: &dyn WingGeometry,
    polar: &AerofoilPolar,
    slip: Option<&SlipstreamProfile>,
    cond: &FlightCondition,
    settings: &LltSettings,
) -> Result<LltSolution> {
    let solver = LltSolver::new(*settings)?;
    solver.prepare(wing, polar, slip, cond)?.solve(cond.alpha_geo)
}

/// Profile-drag coefficient of a solved wing.
pub fn profile_drag(sol: &LltSolution) -> f64 {
    sol.cf
}

/// Induced-drag coefficient of a solved wing.
pub fn induced_drag(sol: &LltSolution) -> f64 {
    sol.cdi
}

/// Angle of attack for `cl_target` at the given resolution.
pub fn trim_alpha(
    wing: &dyn WingGeometry,
    polar: &AerofoilPolar,
    slip: Option<&SlipstreamProfile>,
    cond: &FlightCondition,
    settings: &LltSettings,
    cl_target: f64,
) -> Result<(f64, LltSolution)> {
    let solver = LltSolver::new(*settings)?;
    let prepared = solver.prepare(wing, polar, slip, cond)?;
    prepared.trim_alpha(&prepared.stations.twist, cl_target)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingPolarPoint {
    pub alpha: f64,
    pub cl: f64,
    pub cdi: f64,
    pub cf: f64,
    pub cd: f64,
}

/// Solves over a list of angles (rad).
pub fn wing_polar_sweep(
    wing: &dyn WingGeometry,
    polar: &AerofoilPolar,
    slip: Option<&SlipstreamProfile>,
    cond: &FlightCondition,
    settings: &LltSettings,
    alphas: &[f64],
) -> Result<Vec<WingPolarPoint>> {
    if alphas.is_empty() {
        return Err(Error::validation("angle-of-attack range is empty"));
    }
    let solver = LltSolver::new(*settings)?;
    let prepared = solver.prepare(wing, polar, slip, cond)?;
    alphas
        .iter()
        .map(|&alpha| {
            let sol = prepared.solve(alpha).map_err(|e| match e {
                Error::Solver(msg) => Error::Solver(format!("at α = {:.3}°: {msg}", alpha.to_degrees())),
                other => other,
            })?;
            Ok(WingPolarPoint {
                alpha,
                cl: sol.cl,
                cdi: sol.cdi,
                cf: sol.cf,
                cd: sol.cd,
            })
        })
        .collect()
}

/// `alpha_deg,CL,CDi,Cf,CD` table.
pub fn polar_sweep_csv(points: &[WingPolarPoint]) -> String {
    let mut out = String::new();
    table::write_rows(
        &mut out,
        "alpha_deg,CL,CDi,Cf,CD",
        points.iter().map(|p| vec![p.alpha.to_degrees(), p.cl, p.cdi, p.cf, p.cd]),
    );
    out
}

/// Evenly spaced angles from `start` to `end` inclusive, in degrees.
pub fn alpha_range_deg(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
        return Err(Error::validation(format!(
            "angle range {start}..{end} step {step} is empty or invalid"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| (start + step * i as f64).to_radians()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planform::{CubicBezier, EllipticWing, WingPlanform};
    use approx::assert_relative_eq;

    fn thin_polar(alpha0: f64) -> AerofoilPolar {
        let rows: Vec<(f64, f64, f64)> = (-12..=12)
            .map(|a| {
                let a = a as f64;
                (a, 2.0 * PI * (a.to_radians() - alpha0), 0.01)
            })
            .collect();
        AerofoilPolar::from_rows("thin", 3e5, &rows)
            .unwrap()
            .with_blf(LinearLiftModel::new(2.0 * PI, alpha0, [-10.0, 10.0]).unwrap())
            .unwrap()
    }

    fn cond(alpha_deg: f64) -> FlightCondition {
        FlightCondition::new(15.0, 1.112, alpha_deg.to_radians(), 3e5).unwrap()
    }

    fn rectangle(s: f64, c: f64) -> WingPlanform {
        WingPlanform::new(s, CubicBezier::constant(c), CubicBezier::constant(0.0), 0.0, 0.0).unwrap()
    }

    #[test]
    fn elliptic_closed_form() {
        let wing = EllipticWing::with_aspect_ratio(0.8, 5.35);
        let polar = thin_polar(0.0);
        let sol = solve(&wing, &polar, None, &cond(5.0), &LltSettings::default()).unwrap();
        let ar = 5.35;
        let expected = 2.0 * PI * 5f64.to_radians() / (1.0 + 2.0 / ar);
        assert_relative_eq!(sol.cl, expected, max_relative = 5e-3);
        assert_relative_eq!(sol.cdi, sol.cl * sol.cl / (PI * ar), max_relative = 1e-2);
    }

    #[test]
    fn zero_incidence_zero_lift() {
        let polar = thin_polar(-2f64.to_radians());
        let sol = solve(&rectangle(0.8, 0.3), &polar, None, &cond(-2.0), &LltSettings::default()).unwrap();
        assert!(sol.cl.abs() < 1e-14);
        assert!(sol.cdi.abs() < 1e-14);
    }

    #[test]
    fn constant_drag_constant_chord() {
        let polar = thin_polar(0.0);
        let sol = solve(&rectangle(0.8, 0.3), &polar, None, &cond(3.0), &LltSettings::default()).unwrap();
        assert_relative_eq!(sol.cf, 0.01, max_relative = 1e-13);
        assert_eq!(sol.cd, sol.cdi + sol.cf);
        assert_eq!(sol.endurance, sol.cl / sol.cd);
    }

    #[test]
    fn circulation_vanishes_at_tips() {
        let polar = thin_polar(0.0);
        let wing = rectangle(0.8, 0.3);
        let sol = solve(&wing, &polar, None, &cond(4.0), &LltSettings::default()).unwrap();
        let gmax = sol.gamma.iter().fold(0.0_f64, |a, g| a.max(g.abs()));
        let b = 1.6;
        for theta in [0.0, PI] {
            let g: f64 = sol
                .a_n
                .iter()
                .enumerate()
                .map(|(j, a)| 2.0 * b * 15.0 * a * ((j + 1) as f64 * theta).sin())
                .sum();
            assert!(g.abs() < 1e-9 * gmax);
        }
    }

    #[test]
    fn lift_affine_in_alpha() {
        let polar = thin_polar(0.0);
        let wing = rectangle(0.8, 0.3);
        let solver = LltSolver::new(LltSettings::default()).unwrap();
        let p = solver.prepare(&wing, &polar, None, &cond(0.0)).unwrap();
        let cl: Vec<f64> = [-0.05, 0.0, 0.05, 0.1].iter().map(|&a| p.solve(a).unwrap().cl).collect();
        let slope = (cl[1] - cl[0]) / 0.05;
        for (i, &a) in [-0.05, 0.0, 0.05, 0.1].iter().enumerate() {
            assert_relative_eq!(cl[i], cl[0] + slope * (a + 0.05), epsilon = 1e-10);
        }
    }

    #[test]
    fn faster_slipstream_raises_profile_drag() {
        let polar = thin_polar(0.0);
        let wing = rectangle(0.8, 0.3);
        let slow = SlipstreamProfile::new(vec![0.1, 0.2, 0.3], vec![2.0, 2.0, 2.0], vec![0.0; 3], 1.0).unwrap();
        let fast = SlipstreamProfile::new(vec![0.1, 0.2, 0.3], vec![4.0, 4.0, 4.0], vec![0.0; 3], 1.0).unwrap();
        let c = cond(2.0);
        let s = LltSettings::default();
        let a = solve(&wing, &polar, Some(&slow), &c, &s).unwrap();
        let b = solve(&wing, &polar, Some(&fast), &c, &s).unwrap();
        assert!(b.cf > a.cf);
    }

    #[test]
    fn slipstream_beyond_span_rejected() {
        let polar = thin_polar(0.0);
        let slip = SlipstreamProfile::new(vec![0.5, 0.9], vec![1.0, 1.0], vec![0.0; 2], 1.0).unwrap();
        let r = solve(&rectangle(0.8, 0.3), &polar, Some(&slip), &cond(2.0), &LltSettings::default());
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn unfitted_polar_rejected() {
        let rows = [(-5.0, 0.1, 0.02), (0.0, 0.5, 0.01), (5.0, 0.9, 0.012), (10.0, 1.2, 0.02)];
        let polar = AerofoilPolar::from_rows("raw", 3e5, &rows).unwrap();
        let r = solve(&rectangle(0.8, 0.3), &polar, None, &cond(2.0), &LltSettings::default());
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn symmetric_sweep_antisymmetric_lift() {
        let polar = thin_polar(0.0);
        let wing = rectangle(0.8, 0.3);
        let alphas = alpha_range_deg(-6.0, 6.0, 1.0).unwrap();
        let pts = wing_polar_sweep(&wing, &polar, None, &cond(0.0), &LltSettings::default(), &alphas).unwrap();
        let n = pts.len();
        for i in 0..n {
            assert!((pts[i].cl + pts[n - 1 - i].cl).abs() < 1e-9);
        }
        assert!(alpha_range_deg(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn trim_hits_target() {
        let polar = thin_polar(-3f64.to_radians());
        let wing = rectangle(0.8, 0.3);
        let (alpha, sol) =
            trim_alpha(&wing, &polar, None, &cond(0.0), &LltSettings::default(), 0.7).unwrap();
        assert_relative_eq!(sol.cl, 0.7, epsilon = 1e-12);
        assert_eq!(sol.alpha_geo, alpha);
    }

    #[test]
    fn density_does_not_enter_coefficients() {
        let polar = thin_polar(0.0);
        let wing = rectangle(0.8, 0.3);
        let a = solve(&wing, &polar, None, &cond(3.0), &LltSettings::default()).unwrap();
        let mut c = cond(3.0);
        c.rho *= 7.3;
        let b = solve(&wing, &polar, None, &c, &LltSettings::default()).unwrap();
        assert_eq!(a.cl, b.cl);
        assert_eq!(a.cd, b.cd);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn induced_drag_above_elliptic_bound(
                t in proptest::array::uniform4(-0.1f64..0.1),
                c in proptest::array::uniform4(0.1f64..0.5),
                alpha in -0.1f64..0.15,
            ) {
                let polar = thin_polar(0.0);
                let wing = WingPlanform::new(0.8, CubicBezier(c), CubicBezier(t), 0.0, 0.0).unwrap();
                let settings = LltSettings { n_collocation: 120, n_modes: 24 };
                let sol = solve(&wing, &polar, None, &cond(alpha.to_degrees()), &settings).unwrap();
                let ar = wing.aspect_ratio();
                prop_assert!(sol.cdi >= sol.cl * sol.cl / (PI * ar) - 1e-9);
                prop_assert_eq!(sol.cd, sol.cdi + sol.cf);
            }
        }
    }
}
