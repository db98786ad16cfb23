//! Constrained planform optimisation.
//!
//! The free variables are the two interior chord control values and all
//! four twist control values; the chord end values stay pinned to the
//! control wing. Wing area is held by exact projection of the interior
//! chord controls, the lift constraint by an augmented Lagrangian around a
//! deterministic compass search with pattern moves. Each outer iterate is
//! finished by a uniform twist shift that places CL exactly on its target
//! (lift is affine in a uniform twist change).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::llt::{FlightCondition, LltSettings, LltSolution, LltSolver, PreparedWing};
use crate::planform::{CubicBezier, WingPlanform};
use crate::polar::AerofoilPolar;
use crate::slipstream::SlipstreamProfile;
use crate::table;

/// Standard gravity used by [`endurance_range`], m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

const CHORD_SCALE: f64 = 0.1;
const TWIST_SCALE: f64 = 10.0 * std::f64::consts::PI / 180.0;
const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-4;
const TIE: f64 = 1e-12;
const INNER_BUDGET: usize = 2500;
const CACHE_SLOTS: usize = 4;
const FEASIBILITY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    InducedDrag,
    TotalDrag,
    /// Maximise `CL / CD`.
    Endurance,
}

impl std::str::FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced_drag" | "induced" => Ok(Self::InducedDrag),
            "total_drag" | "total" => Ok(Self::TotalDrag),
            "endurance" => Ok(Self::Endurance),
            other => Err(Error::validation(format!(
                "cost `{other}` is not induced_drag, total_drag or endurance"
            ))),
        }
    }
}

impl CostKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InducedDrag => "induced_drag",
            Self::TotalDrag => "total_drag",
            Self::Endurance => "endurance",
        }
    }

    fn raw(&self, sol: &LltSolution) -> f64 {
        match self {
            Self::InducedDrag => sol.cdi,
            Self::TotalDrag => sol.cd,
            Self::Endurance => -sol.endurance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClMode {
    Fixed(f64),
    /// CL may float within `center · (1 ± frac)`.
    Band { center: f64, frac: f64 },
}

impl ClMode {
    /// `[lo, hi]` admissible lift coefficients.
    pub fn limits(&self) -> [f64; 2] {
        match *self {
            Self::Fixed(t) => [t, t],
            Self::Band { center, frac } => [center * (1.0 - frac), center * (1.0 + frac)],
        }
    }

    fn reference(&self) -> f64 {
        match *self {
            Self::Fixed(t) => t,
            Self::Band { center, .. } => center,
        }
    }

    /// Distance of `cl` outside the admissible set.
    pub fn violation(&self, cl: f64) -> f64 {
        let [lo, hi] = self.limits();
        (lo - cl).max(cl - hi).max(0.0)
    }

    /// A zero-width band is the equality constraint.
    fn normalised(&self) -> Self {
        match *self {
            Self::Band { center, frac: 0.0 } => Self::Fixed(center),
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimisationSpec {
    pub cost: CostKind,
    pub cl_mode: ClMode,
    /// Twist control bounds, rad.
    pub twist_bounds: [f64; 2],
    /// Interior chord control bounds, m.
    pub chord_bounds: [f64; 2],
    pub fixed_area: f64,
    pub fixed_root_tip: (f64, f64),
    pub max_outer_iters: usize,
    pub tolerance: f64,
}

impl OptimisationSpec {
    /// Defaults for the bounds and iteration limits around a control wing.
    pub fn for_control(control: &WingPlanform, cost: CostKind, cl_mode: ClMode) -> Self {
        Self {
            cost,
            cl_mode,
            twist_bounds: [(-8f64).to_radians(), 8f64.to_radians()],
            chord_bounds: [0.05, 0.6],
            fixed_area: control.wing_area(),
            fixed_root_tip: (control.chord.0[0], control.chord.0[3]),
            max_outer_iters: 12,
            tolerance: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.cl_mode {
            ClMode::Fixed(t) if !(t > 0.0) => {
                return Err(Error::validation(format!("CL target {t} must be positive")))
            }
            ClMode::Band { center, frac } if !(center > 0.0) || !(0.0..=1.0).contains(&frac) => {
                return Err(Error::validation(format!(
                    "CL band centre {center} must be positive and width {frac} within [0, 1]"
                )))
            }
            _ => {}
        }
        let [tl, th] = self.twist_bounds;
        let [cl, ch] = self.chord_bounds;
        if !(tl < th) || !(0.0 < cl && cl < ch) {
            return Err(Error::validation("optimiser bounds must be ordered with positive chords"));
        }
        if !(self.fixed_area > 0.0) || self.max_outer_iters == 0 || !(self.tolerance > 0.0) {
            return Err(Error::validation(
                "optimiser needs positive area, tolerance and at least one outer iteration",
            ));
        }
        Ok(())
    }
}

/// Polar, slipstream and flight condition shared by every evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Environment<'a> {
    pub polar: &'a AerofoilPolar,
    pub slip: Option<&'a SlipstreamProfile>,
    pub cond: FlightCondition,
    pub settings: LltSettings,
}

/// Change of one coefficient between the control and optimised wings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delta {
    /// Drag counts (1e-4 of a coefficient).
    pub counts: f64,
    pub percent: f64,
}

/// Improvements are positive: drag reductions and lift or endurance gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaMetrics {
    pub d_cdi: Delta,
    pub d_cf: Delta,
    pub d_cd: Delta,
    pub d_cl: Delta,
    /// Percent change of `CL / CD`.
    pub d_endurance: f64,
}

fn reduction(control: f64, opt: f64) -> Delta {
    Delta {
        counts: 1e4 * (control - opt),
        percent: 100.0 * (control - opt) / control,
    }
}

fn gain(control: f64, opt: f64) -> Delta {
    Delta {
        counts: 1e4 * (opt - control),
        percent: 100.0 * (opt - control) / control,
    }
}

pub fn delta_metrics(control: &LltSolution, opt: &LltSolution) -> DeltaMetrics {
    DeltaMetrics {
        d_cdi: reduction(control.cdi, opt.cdi),
        d_cf: reduction(control.cf, opt.cf),
        d_cd: reduction(control.cd, opt.cd),
        d_cl: gain(control.cl, opt.cl),
        d_endurance: gain(control.endurance, opt.endurance).percent,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Battery {
    /// Specific energy, J/kg.
    pub e_star: f64,
    pub eta_total: f64,
    pub m_battery: f64,
    pub m_total: f64,
}

impl Battery {
    pub fn validate(&self) -> Result<()> {
        if !(self.m_battery > 0.0 && self.m_total > 0.0 && self.m_battery <= self.m_total) {
            return Err(Error::validation("battery mass must be positive and at most the total mass"));
        }
        if !(self.eta_total > 0.0 && self.eta_total <= 1.0) || !(self.e_star >= 0.0) {
            return Err(Error::validation("efficiency must lie in (0, 1] and energy be non-negative"));
        }
        Ok(())
    }
}

/// Range `e* η (L/D) m_b / (g m)` for a lift-to-drag ratio.
pub fn range_for_lift_to_drag(lift_to_drag: f64, battery: &Battery) -> f64 {
    battery.e_star * battery.eta_total / STANDARD_GRAVITY * lift_to_drag * (battery.m_battery / battery.m_total)
}

/// Battery-electric range at the solution's `CL / CD`, m.
pub fn endurance_range(sol: &LltSolution, battery: &Battery) -> Result<f64> {
    battery.validate()?;
    Ok(range_for_lift_to_drag(sol.endurance, battery))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord {
    pub iter: usize,
    /// Normalised cost at the end of the iteration.
    pub cost: f64,
    pub cl: f64,
    pub cdi: f64,
    pub cf: f64,
    pub cd: f64,
    pub violation: f64,
    /// Augmented objective at the start and end of the inner search, under
    /// the multipliers of this iteration.
    pub aug_start: f64,
    pub aug_end: f64,
}

#[derive(Debug, Clone)]
pub struct OptimisationResult {
    pub planform_opt: WingPlanform,
    pub sol_opt: LltSolution,
    pub control_sol: LltSolution,
    pub deltas: DeltaMetrics,
    pub history: Vec<HistoryRecord>,
    pub converged: bool,
    /// Normalised cost of the control wing and of the optimum.
    pub cost_control: f64,
    pub cost_opt: f64,
    pub evaluations: usize,
}

impl OptimisationResult {
    /// `iter,cost,cl,cdi,cf,cd,violation` table.
    pub fn history_csv(&self) -> String {
        let mut out = String::new();
        table::write_rows(
            &mut out,
            "iter,cost,cl,cdi,cf,cd,violation",
            self.history
                .iter()
                .map(|h| vec![h.iter as f64, h.cost, h.cl, h.cdi, h.cf, h.cd, h.violation]),
        );
        out
    }

    /// Flat `key=value` summary.
    pub fn summary(&self) -> String {
        let c = &self.control_sol;
        let o = &self.sol_opt;
        let d = &self.deltas;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("converged", self.converged.to_string());
        kv("evaluations", self.evaluations.to_string());
        kv("outer_iterations", self.history.len().to_string());
        kv("cost_control", fmt(self.cost_control));
        kv("cost_opt", fmt(self.cost_opt));
        for (tag, s) in [("control", c), ("opt", o)] {
            kv(&format!("{tag}.CL"), fmt(s.cl));
            kv(&format!("{tag}.CDi"), fmt(s.cdi));
            kv(&format!("{tag}.Cf"), fmt(s.cf));
            kv(&format!("{tag}.CD"), fmt(s.cd));
            kv(&format!("{tag}.CL_CD"), fmt(s.endurance));
        }
        for (tag, v) in [("dCDi", d.d_cdi), ("dCf", d.d_cf), ("dCD", d.d_cd), ("dCL", d.d_cl)] {
            kv(&format!("{tag}.counts"), fmt(v.counts));
            kv(&format!("{tag}.percent"), fmt(v.percent));
        }
        kv("dCL_CD.percent", fmt(d.d_endurance));
        let p = &self.planform_opt;
        kv("opt.chord_ctrl_m", join(&p.chord.0));
        kv("opt.twist_ctrl_deg", join(&p.twist.0.map(f64::to_degrees)));
        kv("opt.area_m2", fmt(p.wing_area()));
        out
    }
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(";")
}

/// Optimises chord and twist of `control` at the flight condition's angle
/// of attack.
pub fn optimize(control: &WingPlanform, spec: &OptimisationSpec, env: &Environment) -> Result<OptimisationResult> {
    spec.validate()?;
    let solver = LltSolver::new(env.settings)?;
    let mut problem = Problem::new(&solver, control, spec, env)?;
    problem.run()
}

struct Problem<'a> {
    solver: &'a LltSolver,
    env: &'a Environment<'a>,
    spec: OptimisationSpec,
    mode: ClMode,
    control: WingPlanform,
    cost_ref: f64,
    cache: Vec<([u64; 2], PreparedWing<'a>)>,
    evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Multipliers {
    eq: f64,
    lo: f64,
    hi: f64,
    penalty: f64,
}

impl<'a> Problem<'a> {
    fn new(
        solver: &'a LltSolver,
        control: &WingPlanform,
        spec: &OptimisationSpec,
        env: &'a Environment<'a>,
    ) -> Result<Self> {
        control.validate()?;
        let area = control.wing_area();
        if ((area - spec.fixed_area) / spec.fixed_area).abs() > FEASIBILITY {
            return Err(Error::validation(format!(
                "control wing area {area} m² differs from the fixed area {} m²",
                spec.fixed_area
            )));
        }
        if control.chord.0[0] != spec.fixed_root_tip.0 || control.chord.0[3] != spec.fixed_root_tip.1 {
            return Err(Error::validation("control wing root/tip chords differ from the fixed values"));
        }
        let [cl, ch] = spec.chord_bounds;
        let [tl, th] = spec.twist_bounds;
        if control.chord.0[1..3].iter().any(|c| *c < cl || *c > ch) || control.twist.0.iter().any(|t| *t < tl || *t > th) {
            return Err(Error::validation("control wing lies outside the optimiser bounds"));
        }
        let mut problem = Self {
            solver,
            env,
            spec: *spec,
            mode: spec.cl_mode.normalised(),
            control: *control,
            cost_ref: 1.0,
            cache: Vec::with_capacity(CACHE_SLOTS),
            evaluations: 0,
        };
        let x0 = problem.encode(control);
        let sol = problem.evaluate(&x0)?;
        let v = problem.mode.violation(sol.cl);
        if v > FEASIBILITY {
            return Err(Error::validation(format!(
                "control wing CL {} violates the lift constraint by {v}",
                sol.cl
            )));
        }
        let raw = spec.cost.raw(&sol);
        if !(raw.abs() > 0.0) {
            return Err(Error::validation("control wing cost is zero; cannot normalise"));
        }
        problem.cost_ref = raw.abs();
        Ok(problem)
    }

    fn encode(&self, p: &WingPlanform) -> [f64; 6] {
        let c = p.chord.0;
        let t = p.twist.0;
        [
            c[1] / CHORD_SCALE,
            c[2] / CHORD_SCALE,
            t[0] / TWIST_SCALE,
            t[1] / TWIST_SCALE,
            t[2] / TWIST_SCALE,
            t[3] / TWIST_SCALE,
        ]
    }

    fn chords(&self, x: &[f64; 6]) -> CubicBezier {
        let c = self.control.chord.0;
        CubicBezier([c[0], x[0] * CHORD_SCALE, x[1] * CHORD_SCALE, c[3]])
    }

    fn twists(&self, x: &[f64; 6]) -> CubicBezier {
        CubicBezier([x[2], x[3], x[4], x[5]].map(|v| v * TWIST_SCALE))
    }

    fn planform(&self, x: &[f64; 6]) -> WingPlanform {
        WingPlanform {
            chord: self.chords(x),
            twist: self.twists(x),
            ..self.control
        }
    }

    /// Box bounds, then the interior chords onto the fixed-area line.
    fn project(&self, x: &mut [f64; 6]) {
        let [tl, th] = self.spec.twist_bounds.map(|v| v / TWIST_SCALE);
        for v in &mut x[2..] {
            *v = v.clamp(tl, th);
        }
        let [cl, ch] = self.spec.chord_bounds.map(|v| v / CHORD_SCALE);
        let s = self.control.semi_span;
        let c = self.control.chord.0;
        let sum = (2.0 * self.spec.fixed_area / s - c[0] - c[3]) / CHORD_SCALE;
        let shift = 0.5 * (sum - x[0] - x[1]);
        let a = (x[0] + shift).clamp(cl, ch);
        let b = (sum - a).clamp(cl, ch);
        let a = (sum - b).clamp(cl, ch);
        x[0] = a;
        x[1] = b;
    }

    fn evaluate(&mut self, x: &[f64; 6]) -> Result<LltSolution> {
        self.evaluations += 1;
        let chord = self.chords(x);
        let key = [chord.0[1].to_bits(), chord.0[2].to_bits()];
        let slot = match self.cache.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                let planform = self.planform(x);
                let prepared = self
                    .solver
                    .prepare(&planform, self.env.polar, self.env.slip, &self.env.cond)
                    .map_err(|e| self.tag(e, x))?;
                if self.cache.len() == CACHE_SLOTS {
                    self.cache.remove(0);
                }
                self.cache.push((key, prepared));
                self.cache.len() - 1
            }
        };
        let twist = self.twists(x);
        let prepared = &self.cache[slot].1;
        let t = prepared.twist_from(|e| twist.eval(e));
        prepared
            .solve_with_twist(&t, self.env.cond.alpha_geo)
            .map_err(|e| self.tag(e, x))
    }

    fn tag(&self, e: Error, x: &[f64; 6]) -> Error {
        let p = self.planform(x);
        let at = format!(
            "candidate chord [{}] m, twist [{}] deg",
            join(&p.chord.0),
            join(&p.twist.0.map(f64::to_degrees))
        );
        match e {
            Error::Solver(m) => Error::Solver(format!("{m} at {at}")),
            Error::Validation(m) => Error::Validation(format!("{m} at {at}")),
            other => other,
        }
    }

    fn cost(&self, sol: &LltSolution) -> f64 {
        self.spec.cost.raw(sol) / self.cost_ref
    }

    fn augmented(&self, sol: &LltSolution, m: &Multipliers) -> f64 {
        let f = self.cost(sol);
        let scale = self.mode.reference();
        match self.mode {
            ClMode::Fixed(t) => {
                let h = (sol.cl - t) / scale;
                f + m.eq * h + 0.5 * m.penalty * h * h
            }
            ClMode::Band { .. } => {
                let [lo, hi] = self.mode.limits();
                let g_lo = (lo - sol.cl) / scale;
                let g_hi = (sol.cl - hi) / scale;
                let phr = |mu: f64, g: f64| ((mu + m.penalty * g).max(0.0).powi(2) - mu * mu) / (2.0 * m.penalty);
                f + phr(m.lo, g_lo) + phr(m.hi, g_hi)
            }
        }
    }

    /// Compass search with pattern moves on the augmented objective.
    fn search(&mut self, start: [f64; 6], step0: f64, m: &Multipliers) -> Result<([f64; 6], f64, f64)> {
        let mut x = start;
        let mut fx = {
            let s = self.evaluate(&x)?;
            self.augmented(&s, m)
        };
        let mut step = step0;
        let mut evals = 0;
        while step >= MIN_STEP && evals < INNER_BUDGET {
            let mut moved = false;
            'poll: for i in 0..6 {
                for sign in [1.0, -1.0] {
                    let mut cand = x;
                    cand[i] += sign * step;
                    self.project(&mut cand);
                    if cand == x {
                        continue;
                    }
                    evals += 1;
                    let s = self.evaluate(&cand)?;
                    let fc = self.augmented(&s, m);
                    if fc < fx - TIE {
                        let mut pattern = cand;
                        for j in 0..6 {
                            pattern[j] += cand[j] - x[j];
                        }
                        self.project(&mut pattern);
                        x = cand;
                        fx = fc;
                        if pattern != cand {
                            evals += 1;
                            let s = self.evaluate(&pattern)?;
                            let fp = self.augmented(&s, m);
                            if fp < fx - TIE {
                                x = pattern;
                                fx = fp;
                            }
                        }
                        moved = true;
                        break 'poll;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        Ok((x, fx, step))
    }

    /// Uniform twist shift that brings CL onto the nearest admissible value.
    fn polish(&mut self, x: [f64; 6]) -> Result<([f64; 6], LltSolution)> {
        let sol = self.evaluate(&x)?;
        let [lo, hi] = self.mode.limits();
        let target = sol.cl.clamp(lo, hi);
        if sol.cl == target {
            return Ok((x, sol));
        }
        let probe_shift = 0.01;
        let mut probe = x;
        for v in &mut probe[2..] {
            *v += probe_shift;
        }
        let slope = (self.evaluate(&probe)?.cl - sol.cl) / probe_shift;
        if !(slope.abs() > 0.0) {
            return Ok((x, sol));
        }
        let [tl, th] = self.spec.twist_bounds.map(|v| v / TWIST_SCALE);
        let tmax = x[2..].iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v));
        let tmin = x[2..].iter().fold(f64::INFINITY, |a, v| a.min(*v));
        let shift = ((target - sol.cl) / slope).clamp(tl - tmin, th - tmax);
        let mut y = x;
        for v in &mut y[2..] {
            *v += shift;
        }
        let s = self.evaluate(&y)?;
        Ok((y, s))
    }

    fn violation(&self, sol: &LltSolution) -> f64 {
        self.mode.violation(sol.cl) / self.mode.reference()
    }

    fn run(&mut self) -> Result<OptimisationResult> {
        let x0 = self.encode(&self.control.clone());
        let control_sol = self.evaluate(&x0)?;
        let cost_control = self.cost(&control_sol);

        let mut best = (x0, control_sol.clone(), cost_control);
        let mut m = Multipliers {
            eq: 0.0,
            lo: 0.0,
            hi: 0.0,
            penalty: 10.0,
        };
        let mut x = x0;
        let mut history = Vec::new();
        let mut converged = false;
        let mut last_violation = f64::INFINITY;
        let mut step = INITIAL_STEP;
        for iter in 0..self.spec.max_outer_iters {
            let start = self.evaluate(&x)?;
            let aug_start = self.augmented(&start, &m);
            let (xn, aug_end, final_step) = self.search(x, step, &m)?;
            x = xn;
            let sol = self.evaluate(&x)?;
            let violation = self.violation(&sol);
            history.push(HistoryRecord {
                iter,
                cost: self.cost(&sol),
                cl: sol.cl,
                cdi: sol.cdi,
                cf: sol.cf,
                cd: sol.cd,
                violation,
                aug_start,
                aug_end,
            });

            let (xp, sp) = self.polish(x)?;
            let polished_violation = self.violation(&sp);
            if self.mode.violation(sp.cl) <= FEASIBILITY {
                let c = self.cost(&sp);
                if c < best.2 - TIE {
                    best = (xp, sp, c);
                }
            }

            let scale = self.mode.reference();
            match self.mode {
                ClMode::Fixed(t) => m.eq += m.penalty * (sol.cl - t) / scale,
                ClMode::Band { .. } => {
                    let [lo, hi] = self.mode.limits();
                    m.lo = (m.lo + m.penalty * (lo - sol.cl) / scale).max(0.0);
                    m.hi = (m.hi + m.penalty * (sol.cl - hi) / scale).max(0.0);
                }
            }
            // The search grid cannot resolve CL finer than its last step;
            // the polished point is the one that must be feasible.
            if final_step < MIN_STEP && polished_violation.min(violation) < self.spec.tolerance {
                converged = true;
                break;
            }
            if violation > 0.25 * last_violation {
                m.penalty *= 10.0;
            }
            last_violation = violation;
            step = (step * 0.5).max(16.0 * MIN_STEP);
        }

        let (xb, sol_opt, cost_opt) = best;
        let planform_opt = self.planform(&xb);
        Ok(OptimisationResult {
            deltas: delta_metrics(&control_sol, &sol_opt),
            planform_opt,
            sol_opt,
            control_sol,
            history,
            converged,
            cost_control,
            cost_opt,
            evaluations: self.evaluations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planform::WingGeometry;
    use crate::polar::LinearLiftModel;
    use approx::assert_relative_eq;

    fn solution(cl: f64, cdi: f64, cf: f64) -> LltSolution {
        LltSolution {
            theta: vec![],
            y: vec![],
            chord: vec![],
            twist: vec![],
            a_n: vec![],
            gamma: vec![],
            alpha_eff: vec![],
            alpha_downwash: vec![],
            alpha_prop: vec![],
            v_local: vec![],
            cl_span: vec![],
            cd_span: vec![],
            alpha_geo: 0.0,
            v_inf: 15.0,
            semi_span: 0.8,
            area: 0.479,
            cl,
            cdi,
            cf,
            cd: cdi + cf,
            endurance: cl / (cdi + cf),
            residual: 0.0,
            warnings: vec![],
        }
    }

    #[test]
    fn drag_delta_counts_and_percent() {
        let d = delta_metrics(&solution(0.7, 0.0238, 0.046), &solution(0.7, 0.0229, 0.043));
        assert_relative_eq!(d.d_cd.counts, 39.0, epsilon = 1e-9);
        assert_relative_eq!(d.d_cd.percent, 100.0 * 0.0039 / 0.0698, epsilon = 1e-9);
        assert!((d.d_cd.percent - 5.6).abs() < 0.05);
    }

    #[test]
    fn lift_delta_counts_and_percent() {
        let d = delta_metrics(&solution(0.70101, 0.02, 0.04), &solution(0.77111, 0.02, 0.04));
        assert_relative_eq!(d.d_cl.counts, 701.0, epsilon = 1e-8);
        assert_relative_eq!(d.d_cl.percent, 10.0, epsilon = 1e-3);
    }

    #[test]
    fn identical_solutions_have_zero_deltas() {
        let s = solution(0.7, 0.024, 0.046);
        let d = delta_metrics(&s, &s);
        for v in [d.d_cdi, d.d_cf, d.d_cd, d.d_cl] {
            assert_eq!(v.counts, 0.0);
            assert_eq!(v.percent, 0.0);
        }
        assert_eq!(d.d_endurance, 0.0);
    }

    #[test]
    fn range_hand_value() {
        let b = Battery {
            e_star: 720_000.0,
            eta_total: 0.5,
            m_battery: 0.3,
            m_total: 1.0,
        };
        let r = range_for_lift_to_drag(10.0, &b);
        assert_relative_eq!(r, 720_000.0 * 0.5 * 10.0 * 0.3 / 9.80665, max_relative = 1e-12);
        assert!((r - 110_130.0).abs() < 5.0);
        assert_eq!(range_for_lift_to_drag(0.0, &b), 0.0);
        let bad = Battery { m_battery: 2.0, ..b };
        assert!(endurance_range(&solution(0.7, 0.02, 0.04), &bad).is_err());
    }

    #[test]
    fn band_limits_and_violation() {
        let m = ClMode::Band { center: 0.7, frac: 0.1 };
        let [lo, hi] = m.limits();
        assert_relative_eq!(lo, 0.63, epsilon = 1e-15);
        assert_relative_eq!(hi, 0.77, epsilon = 1e-15);
        assert_eq!(m.violation(0.7), 0.0);
        assert_relative_eq!(m.violation(0.8), 0.03, epsilon = 1e-15);
        assert_eq!(ClMode::Band { center: 0.7, frac: 0.0 }.normalised(), ClMode::Fixed(0.7));
    }

    fn test_polar() -> AerofoilPolar {
        let rows: Vec<(f64, f64, f64)> = (-10..=14)
            .map(|a| {
                let a = a as f64;
                let cl = 0.1 * (a + 5.0);
                (a, cl, 0.01 + 0.01 * (cl - 0.9).powi(2))
            })
            .collect();
        AerofoilPolar::from_rows("test", 3e5, &rows)
            .unwrap()
            .with_blf(LinearLiftModel::new(0.1f64.to_degrees(), (-5f64).to_radians(), [-5.0, 10.0]).unwrap())
            .unwrap()
    }

    fn control() -> WingPlanform {
        WingPlanform::new(
            0.8,
            CubicBezier::linear(0.36, 0.24),
            CubicBezier::constant(0.0),
            0.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn infeasible_control_rejected() {
        let polar = test_polar();
        let env = Environment {
            polar: &polar,
            slip: None,
            cond: FlightCondition::new(15.0, 1.2, 0.0, 3e5).unwrap(),
            settings: LltSettings { n_collocation: 40, n_modes: 10 },
        };
        let wing = control();
        let spec = OptimisationSpec::for_control(&wing, CostKind::InducedDrag, ClMode::Fixed(0.9));
        assert!(matches!(optimize(&wing, &spec, &env), Err(Error::Validation(_))));
        let mut bad_area = spec;
        bad_area.fixed_area *= 1.01;
        assert!(matches!(optimize(&wing, &bad_area, &env), Err(Error::Validation(_))));
    }

    #[test]
    fn induced_drag_run_feasible_and_not_worse() {
        let polar = test_polar();
        let cond = FlightCondition::new(15.0, 1.2, 0.0, 3e5).unwrap();
        let settings = LltSettings { n_collocation: 40, n_modes: 10 };
        let wing = control();
        let base = crate::llt::solve(&wing, &polar, None, &cond, &settings).unwrap();
        let env = Environment {
            polar: &polar,
            slip: None,
            cond,
            settings,
        };
        let spec = OptimisationSpec::for_control(&wing, CostKind::InducedDrag, ClMode::Fixed(base.cl));
        let r = optimize(&wing, &spec, &env).unwrap();
        assert!(r.cost_opt <= r.cost_control + 1e-12);
        assert!((r.sol_opt.cl - base.cl).abs() < 1e-6);
        assert_eq!(r.planform_opt.chord.0[0], wing.chord.0[0]);
        assert_eq!(r.planform_opt.chord.0[3], wing.chord.0[3]);
        assert!(((r.planform_opt.wing_area() - wing.wing_area()) / wing.wing_area()).abs() < 1e-6);
        for h in &r.history {
            assert!(h.aug_end <= h.aug_start);
        }
        // close to the elliptic bound
        let ar = wing.aspect_ratio();
        assert!(r.sol_opt.cdi < 1.01 * base.cl * base.cl / (std::f64::consts::PI * ar));
        let csv = r.history_csv();
        assert!(csv.starts_with("iter,cost,cl,cdi,cf,cd,violation\n"));
        assert!(r.summary().contains("converged="));
    }
}
