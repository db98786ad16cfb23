//! Python bindings. Angles cross the boundary in degrees.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use propwing::cases::config::REFERENCE_KEYS;
use propwing::cases::{self, CaseConfig};
use propwing::llt::{self, FlightCondition, LltSettings, LltSolution};
use propwing::optimizer::{self, ClMode, CostKind, Environment, OptimisationSpec};
use propwing::planform::{self, ControlWingSpec, CubicBezier, WingPlanform};
use propwing::polar::{self, AerofoilPolar, LiftMode};
use propwing::slipstream::{self, PropOperatingPoint, SlipstreamProfile};
use propwing::Error;

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse { .. } | Error::Validation(_) | Error::Fit(_) | Error::Domain(_) => PyValueError::new_err(msg),
        Error::Io { .. } => PyOSError::new_err(msg),
        _ => PyRuntimeError::new_err(msg),
    }
}

#[pyclass(name = "Polar", module = "propwing")]
struct Polar(AerofoilPolar);

#[pymethods]
impl Polar {
    /// Reads `alpha_deg,cl,cd`; fits the linear lift model when `window` is given.
    #[staticmethod]
    #[pyo3(signature = (path, reynolds, window=None))]
    fn load(path: PathBuf, reynolds: f64, window: Option<(f64, f64)>) -> PyResult<Self> {
        let p = polar::load_polar_file(&path, reynolds).map_err(to_py)?;
        match window {
            Some((lo, hi)) => Ok(Self(p.fitted([lo, hi]).map_err(to_py)?)),
            None => Ok(Self(p)),
        }
    }

    /// `(a0 per rad, alpha0 deg)` over the window.
    fn fit(&self, lo: f64, hi: f64) -> PyResult<(f64, f64)> {
        let m = self.0.fit_blf([lo, hi]).map_err(to_py)?;
        Ok((m.a0, m.alpha0.to_degrees()))
    }

    /// Section lift, from the fitted model when present.
    fn cl(&self, alpha_deg: f64) -> PyResult<f64> {
        let mode = if self.0.blf().is_some() { LiftMode::Blf } else { LiftMode::Tabulated };
        self.0.cl_of_alpha(alpha_deg.to_radians(), mode).map_err(to_py)
    }

    fn cd(&self, cl: f64) -> f64 {
        self.0.cd_of_cl(cl)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn reynolds(&self) -> f64 {
        self.0.reynolds()
    }
}

#[pyclass(name = "Slipstream", module = "propwing")]
struct Slipstream(SlipstreamProfile);

#[pymethods]
impl Slipstream {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        slipstream::load_slipstream_file(&path).map(Self).map_err(to_py)
    }

    /// `(u_axial, w_down)` in m/s at spanwise station `y`.
    fn sample(&self, y: f64) -> (f64, f64) {
        let s = self.0.sample(y);
        (s.u, s.w)
    }
}

#[pyclass(name = "Planform", module = "propwing")]
struct Planform(WingPlanform);

#[pymethods]
impl Planform {
    #[new]
    #[pyo3(signature = (semi_span, chord, twist_deg, sweep_le_deg=0.0, alpha_geo_deg=0.0))]
    fn new(semi_span: f64, chord: [f64; 4], twist_deg: [f64; 4], sweep_le_deg: f64, alpha_geo_deg: f64) -> PyResult<Self> {
        WingPlanform::new(
            semi_span,
            CubicBezier(chord),
            CubicBezier(twist_deg.map(f64::to_radians)),
            sweep_le_deg.to_radians(),
            alpha_geo_deg.to_radians(),
        )
        .map(Self)
        .map_err(to_py)
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        WingPlanform::from_csv(text.as_bytes()).map(Self).map_err(to_py)
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    #[getter]
    fn semi_span(&self) -> f64 {
        self.0.semi_span
    }

    #[getter]
    fn chord_controls(&self) -> [f64; 4] {
        self.0.chord.0
    }

    #[getter]
    fn twist_controls_deg(&self) -> [f64; 4] {
        self.0.twist.0.map(f64::to_degrees)
    }

    #[getter]
    fn area(&self) -> f64 {
        self.0.wing_area()
    }

    #[getter]
    fn mac(&self) -> f64 {
        self.0.mac()
    }

    /// Chord at `t = 2y/b`.
    fn chord(&self, t: f64) -> PyResult<f64> {
        self.0.eval_chord(t).map_err(to_py)
    }

    fn twist_deg(&self, t: f64) -> PyResult<f64> {
        self.0.eval_twist(t).map(f64::to_degrees).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Planform(semi_span={}, chord={:?}, twist_deg={:?})",
            self.0.semi_span,
            self.0.chord.0,
            self.twist_controls_deg()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (span, area, root_chord, tip_chord, washout_deg=0.0, sweep_le_deg=0.0))]
fn control_wing(
    span: f64,
    area: f64,
    root_chord: f64,
    tip_chord: f64,
    washout_deg: f64,
    sweep_le_deg: f64,
) -> PyResult<Planform> {
    planform::control_wing(&ControlWingSpec {
        span,
        area,
        root_chord,
        tip_chord,
        washout: washout_deg.to_radians(),
        sweep_le: sweep_le_deg.to_radians(),
        alpha_geo: 0.0,
    })
    .map(Planform)
    .map_err(to_py)
}

fn solution_dict<'py>(py: Python<'py>, sol: &LltSolution) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("alpha_geo_deg", sol.alpha_geo.to_degrees())?;
    d.set_item("cl", sol.cl)?;
    d.set_item("cdi", sol.cdi)?;
    d.set_item("cf", sol.cf)?;
    d.set_item("cd", sol.cd)?;
    d.set_item("endurance", sol.endurance)?;
    d.set_item("y", sol.y.clone())?;
    d.set_item("gamma", sol.gamma.clone())?;
    d.set_item("cl_span", sol.cl_span.clone())?;
    d.set_item("warnings", sol.warnings.clone())?;
    Ok(d)
}

/// Lifting-line solve at `alpha_deg`; returns coefficients and spanwise arrays.
#[pyfunction]
#[pyo3(signature = (wing, polar, v_inf, rho, alpha_deg, reynolds, slipstream=None, n_collocation=320, n_modes=48))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    wing: &Planform,
    polar: &Polar,
    v_inf: f64,
    rho: f64,
    alpha_deg: f64,
    reynolds: f64,
    slipstream: Option<&Slipstream>,
    n_collocation: usize,
    n_modes: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cond = FlightCondition::new(v_inf, rho, alpha_deg.to_radians(), reynolds).map_err(to_py)?;
    let settings = LltSettings { n_collocation, n_modes };
    let sol = llt::solve(&wing.0, &polar.0, slipstream.map(|s| &s.0), &cond, &settings).map_err(to_py)?;
    solution_dict(py, &sol)
}

/// Optimises chord and twist of `wing` at fixed area and root/tip chords.
/// `band` is the fractional CL band; omitted means CL is held at `cl_target`.
#[pyfunction]
#[pyo3(signature = (wing, polar, v_inf, rho, alpha_deg, reynolds, cl_target, cost="total_drag", band=None, slipstream=None))]
#[allow(clippy::too_many_arguments)]
fn optimize<'py>(
    py: Python<'py>,
    wing: &Planform,
    polar: &Polar,
    v_inf: f64,
    rho: f64,
    alpha_deg: f64,
    reynolds: f64,
    cl_target: f64,
    cost: &str,
    band: Option<f64>,
    slipstream: Option<&Slipstream>,
) -> PyResult<(Planform, Bound<'py, PyDict>)> {
    let cost: CostKind = cost.parse().map_err(to_py)?;
    let cl_mode = match band {
        Some(frac) => ClMode::Band { center: cl_target, frac },
        None => ClMode::Fixed(cl_target),
    };
    let mut control = wing.0;
    control.alpha_geo = alpha_deg.to_radians();
    let spec = OptimisationSpec::for_control(&control, cost, cl_mode);
    let env = Environment {
        polar: &polar.0,
        slip: slipstream.map(|s| &s.0),
        cond: FlightCondition::new(v_inf, rho, control.alpha_geo, reynolds).map_err(to_py)?,
        settings: LltSettings::default(),
    };
    let result = py
        .detach(|| optimizer::optimize(&control, &spec, &env))
        .map_err(to_py)?;
    let d = solution_dict(py, &result.sol_opt)?;
    d.set_item("converged", result.converged)?;
    d.set_item("control_cl", result.control_sol.cl)?;
    d.set_item("control_cd", result.control_sol.cd)?;
    d.set_item("dcd_percent", result.deltas.d_cd.percent)?;
    d.set_item("dcl_cd_percent", result.deltas.d_endurance)?;
    d.set_item("evaluations", result.evaluations)?;
    Ok((Planform(result.planform_opt), d))
}

/// `J = V / (n D)` for a shaft speed in rpm.
#[pyfunction]
fn advance_ratio(v_inf: f64, rpm: f64, diameter: f64) -> PyResult<f64> {
    if !(rpm > 0.0 && diameter > 0.0) {
        return Err(PyValueError::new_err("rpm and diameter must be positive"));
    }
    Ok(v_inf / (rpm / 60.0 * diameter))
}

/// `CT = T / (rho n^2 D^4)`.
#[pyfunction]
fn thrust_coefficient(thrust: f64, rpm: f64, rho: f64, diameter: f64) -> PyResult<f64> {
    if !(rpm > 0.0 && rho > 0.0 && diameter > 0.0) {
        return Err(PyValueError::new_err("rpm, rho and diameter must be positive"));
    }
    let n = rpm / 60.0;
    Ok(thrust / (rho * n * n * diameter.powi(4)))
}

/// `[(J, CT)]` of a tabulated blade over the given forward speeds.
#[pyfunction]
#[pyo3(signature = (geometry, section_polar, rpm, speeds, rho=1.225, section_reynolds=1e5))]
fn ct_sweep(
    geometry: PathBuf,
    section_polar: PathBuf,
    rpm: f64,
    speeds: Vec<f64>,
    rho: f64,
    section_reynolds: f64,
) -> PyResult<Vec<(f64, f64)>> {
    PropOperatingPoint::from_rpm(1.0, rpm, rho).map_err(to_py)?;
    let section = polar::load_polar_file(&section_polar, section_reynolds).map_err(to_py)?;
    let geom = slipstream::load_propeller_file(&geometry, section).map_err(to_py)?;
    slipstream::ct_sweep(&geom, rpm / 60.0, rho, &speeds).map_err(to_py)
}

/// Runs a case file and returns its `computed.*` values, convergence flag
/// and report text.
#[pyfunction]
#[pyo3(signature = (path, out_dir=None))]
fn run_case<'py>(py: Python<'py>, path: PathBuf, out_dir: Option<PathBuf>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = CaseConfig::load(&path).map_err(to_py)?;
    let out = out_dir.unwrap_or_else(|| cfg.output_dir.clone());
    let report = py.detach(|| cases::run_case_in(&cfg, &out)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("name", &report.name)?;
    d.set_item("converged", report.converged())?;
    for key in REFERENCE_KEYS {
        if let Some(v) = report.computed(key) {
            d.set_item(*key, v)?;
        }
    }
    d.set_item("output_dir", report.output_dir.clone())?;
    d.set_item("report", report.to_text())?;
    Ok(d)
}

#[pymodule(name = "propwing")]
fn propwing_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Polar>()?;
    m.add_class::<Slipstream>()?;
    m.add_class::<Planform>()?;
    m.add_function(wrap_pyfunction!(control_wing, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(advance_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(thrust_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(ct_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_case, m)?)?;
    Ok(())
}
