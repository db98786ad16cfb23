use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::info;

use super::config::{AlphaSetting, CaseConfig, ClModeKind, ClTarget, SlipstreamSource};
use super::svg::{self, Series};
use crate::error::{Error, Result};
use crate::llt::{self, FlightCondition, LltSolution, LltSolver, WingPolarPoint};
use crate::optimizer::{self, ClMode, Environment, OptimisationResult, OptimisationSpec};
use crate::planform::{self, ControlWingSpec, WingPlanform, EXPORT_STATIONS};
use crate::polar::{self, AerofoilPolar};
use crate::slipstream::{self, PropOperatingPoint, PropPlacement, SlipstreamProfile};
use crate::table;

/// Everything a case needs before optimisation, loaded and validated.
#[derive(Debug, Clone)]
pub struct CaseInputs {
    pub polar: AerofoilPolar,
    pub slip: Option<SlipstreamProfile>,
    pub control: WingPlanform,
    /// Flight condition at the operating angle of attack.
    pub cond: FlightCondition,
    pub control_sol: LltSolution,
}

#[derive(Debug, Clone)]
pub struct CaseReport {
    pub name: String,
    pub config: CaseConfig,
    pub inputs: CaseInputs,
    pub result: OptimisationResult,
    pub sweep_prop_on: Option<Vec<WingPolarPoint>>,
    pub sweep_prop_off: Vec<WingPolarPoint>,
    pub output_dir: PathBuf,
    /// Written file names, relative to `output_dir`.
    pub artifacts: Vec<String>,
}

impl CaseReport {
    pub fn converged(&self) -> bool {
        self.result.converged
    }

    /// Value the report lists under `computed.<key>`.
    pub fn computed(&self, key: &str) -> Option<f64> {
        let c = &self.inputs.control_sol;
        let o = &self.result.sol_opt;
        let d = &self.result.deltas;
        Some(match key {
            "alpha_geo_deg" => self.inputs.cond.alpha_geo.to_degrees(),
            "control_CL" => c.cl,
            "control_CDi" => c.cdi,
            "control_Cf" => c.cf,
            "control_CD" => c.cd,
            "opt_CL" => o.cl,
            "opt_CD" => o.cd,
            "dCDi_counts" => d.d_cdi.counts,
            "dCDi_percent" => d.d_cdi.percent,
            "dCf_counts" => d.d_cf.counts,
            "dCf_percent" => d.d_cf.percent,
            "dCD_counts" => d.d_cd.counts,
            "dCD_percent" => d.d_cd.percent,
            "dCL_counts" => d.d_cl.counts,
            "dCL_percent" => d.d_cl.percent,
            "dCL_CD_percent" => d.d_endurance,
            _ => return None,
        })
    }

    /// `key=value` report text.
    pub fn to_text(&self) -> String {
        let cfg = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "# propwing case report");
        let _ = writeln!(
            out,
            "# data provenance: polar {} ({}); slipstream {} ({})",
            file_name(&cfg.polar.file),
            cfg.polar.provenance,
            slip_label(&cfg.slipstream.source),
            cfg.slipstream.provenance
        );
        let _ = writeln!(out, "# computed.* come from this run; reference.* are published values quoted by the case file");
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("case", cfg.name.clone());
        kv("description", cfg.description.clone());
        kv("cost", cfg.optimizer.cost.name().to_string());
        let mode = match cfg.optimizer.cl_mode {
            ClModeKind::Fixed => "fixed",
            ClModeKind::Band => "band",
        };
        kv("cl_mode", mode.to_string());
        kv("alpha_geo_deg", format!("{}", self.inputs.cond.alpha_geo.to_degrees()));
        kv("washout_deg", format!("{}", cfg.control.washout_deg));
        kv("prop_y_frac", format!("{}", cfg.slipstream.prop_y_frac));
        kv("llt", format!("{}x{}", cfg.llt.n_collocation, cfg.llt.n_modes));
        kv("control.area_m2", format!("{}", self.inputs.control.wing_area()));
        kv("control.chord_ctrl_m", join(&self.inputs.control.chord.0));
        let mut text = out;
        text.push_str(&self.result.summary());
        for (key, value) in &cfg.reference {
            if let Some(c) = self.computed(key) {
                let _ = writeln!(text, "computed.{key}={c}");
            }
            let _ = writeln!(text, "reference.{key}={value}");
        }
        for w in self.inputs.control_sol.warnings.iter() {
            let _ = writeln!(text, "warning.control={w}");
        }
        for w in self.result.sol_opt.warnings.iter() {
            let _ = writeln!(text, "warning.opt={w}");
        }
        let _ = writeln!(text, "artifacts={}", self.artifacts.join(";"));
        text
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn slip_label(s: &SlipstreamSource) -> String {
    match s {
        SlipstreamSource::None => "none".into(),
        SlipstreamSource::File(p) => file_name(p),
        SlipstreamSource::Bem(b) => format!("bem:{}@{}rpm", file_name(&b.geometry), b.rpm),
    }
}

fn staged<T>(case: &str, stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Case {
        case: case.to_string(),
        stage,
        source: Box::new(e),
    })
}

fn load_polar(cfg: &CaseConfig) -> Result<AerofoilPolar> {
    polar::load_polar_file(&cfg.polar.file, cfg.polar.reynolds)?.fitted(cfg.polar.blf_window_deg)
}

fn load_slipstream(cfg: &CaseConfig) -> Result<Option<SlipstreamProfile>> {
    let s = 0.5 * cfg.control.span;
    match &cfg.slipstream.source {
        SlipstreamSource::None => Ok(None),
        SlipstreamSource::File(p) => slipstream::load_slipstream_file(p).map(Some),
        SlipstreamSource::Bem(b) => {
            let section = polar::load_polar_file(&b.section_polar, b.section_reynolds)?;
            let geom = slipstream::load_propeller_file(&b.geometry, section)?;
            let op = PropOperatingPoint::from_rpm(cfg.flight.v_inf, b.rpm, cfg.flight.rho)?;
            let bem = slipstream::run_bem(&geom, &op)?;
            let placement = PropPlacement {
                y_center: cfg.slipstream.prop_y_frac * s,
                semi_span: s,
                rotation: b.rotation,
                station_x: b.station_x,
            };
            slipstream::slipstream_from_bem(&bem, &geom, &placement).map(Some)
        }
    }
}

/// Trapezoidal control wing; the taper comes from the MAC when root and
/// tip chords are not stated.
pub fn build_control(cfg: &CaseConfig) -> Result<WingPlanform> {
    let c = &cfg.control;
    let (root, tip) = match (c.root_chord, c.tip_chord) {
        (Some(r), Some(t)) => (r, t),
        _ => planform::trapezoid_from_mac(c.span, c.area, c.mac.unwrap_or(f64::NAN))?,
    };
    planform::control_wing(&ControlWingSpec {
        span: c.span,
        area: c.area,
        root_chord: root,
        tip_chord: tip,
        washout: c.washout_deg.to_radians(),
        sweep_le: c.sweep_le_deg.to_radians(),
        alpha_geo: 0.0,
    })
}

/// Loads data, builds the control wing and solves it at the operating
/// angle. Nothing is written.
pub fn prepare_case(cfg: &CaseConfig) -> Result<CaseInputs> {
    let name = cfg.name.as_str();
    let polar = staged(name, "polar", load_polar(cfg))?;
    let slip = staged(name, "slipstream", load_slipstream(cfg))?;
    let mut control = staged(name, "control", build_control(cfg))?;
    let base = staged(
        name,
        "baseline",
        FlightCondition::new(cfg.flight.v_inf, cfg.flight.rho, 0.0, cfg.flight.reynolds),
    )?;
    let (cond, control_sol) = staged(name, "baseline", {
        let solver = LltSolver::new(cfg.llt);
        solver.and_then(|solver| {
            let prepared = solver.prepare(&control, &polar, slip.as_ref(), &base)?;
            match cfg.control.alpha_geo {
                AlphaSetting::Fixed(a) => Ok((base.with_alpha(a), prepared.solve(a)?)),
                AlphaSetting::Trim => {
                    let twist = prepared.twist_from(|e| control.twist.eval(e));
                    let (a, sol) = prepared.trim_alpha(&twist, cfg.control.design_cl)?;
                    Ok((base.with_alpha(a), sol))
                }
            }
        })
    })?;
    control.alpha_geo = cond.alpha_geo;
    Ok(CaseInputs {
        polar,
        slip,
        control,
        cond,
        control_sol,
    })
}

/// Optimiser settings for a case around its solved control wing.
pub fn optimisation_spec(cfg: &CaseConfig, inputs: &CaseInputs) -> OptimisationSpec {
    let o = &cfg.optimizer;
    let target = match o.cl_target {
        ClTarget::Design => cfg.control.design_cl,
        ClTarget::Control => inputs.control_sol.cl,
        ClTarget::Value(v) => v,
    };
    let mode = match o.cl_mode {
        ClModeKind::Fixed => ClMode::Fixed(target),
        ClModeKind::Band => ClMode::Band {
            center: target,
            frac: o.band_frac,
        },
    };
    OptimisationSpec {
        cost: o.cost,
        cl_mode: mode,
        twist_bounds: o.twist_bounds_deg.map(f64::to_radians),
        chord_bounds: o.chord_bounds_m,
        fixed_area: inputs.control.wing_area(),
        fixed_root_tip: (inputs.control.chord.0[0], inputs.control.chord.0[3]),
        max_outer_iters: o.max_outer_iters,
        tolerance: o.tolerance,
    }
}

pub fn environment<'a>(cfg: &CaseConfig, inputs: &'a CaseInputs) -> Environment<'a> {
    Environment {
        polar: &inputs.polar,
        slip: inputs.slip.as_ref(),
        cond: inputs.cond,
        settings: cfg.llt,
    }
}

/// Runs a case into its configured output directory.
pub fn run_case(cfg: &CaseConfig) -> Result<CaseReport> {
    run_case_in(cfg, &cfg.output_dir)
}

/// Runs a case, writing every artifact into `out_dir`. All inputs are
/// loaded and every computation finishes before the first file is written.
pub fn run_case_in(cfg: &CaseConfig, out_dir: &Path) -> Result<CaseReport> {
    let name = cfg.name.as_str();
    info!("case {name}: preparing");
    let inputs = prepare_case(cfg)?;
    let spec = optimisation_spec(cfg, &inputs);
    info!("case {name}: optimising ({})", spec.cost.name());
    let mut result = staged(name, "optimize", optimizer::optimize(&inputs.control, &spec, &environment(cfg, &inputs)))?;
    result.planform_opt.alpha_geo = inputs.cond.alpha_geo;

    let alphas = staged(
        name,
        "sweep",
        llt::alpha_range_deg(cfg.sweep_deg[0], cfg.sweep_deg[1], cfg.sweep_deg[2]),
    )?;
    let (on, off) = staged(name, "sweep", sweeps(cfg, &inputs, &alphas))?;

    let files = artifact_files(cfg, &inputs, &result, on.as_deref(), &off);
    let mut report = CaseReport {
        name: cfg.name.clone(),
        config: cfg.clone(),
        inputs,
        result,
        sweep_prop_on: on,
        sweep_prop_off: off,
        output_dir: out_dir.to_path_buf(),
        artifacts: std::iter::once("report.txt".to_string())
            .chain(files.iter().map(|(n, _)| n.clone()))
            .collect(),
    };
    let text = report.to_text();
    staged(name, "write", write_all(out_dir, &files, &text))?;
    report.output_dir = out_dir.to_path_buf();
    info!("case {name}: done, converged = {}", report.converged());
    Ok(report)
}

type Sweeps = (Option<Vec<WingPolarPoint>>, Vec<WingPolarPoint>);

fn sweeps(cfg: &CaseConfig, inputs: &CaseInputs, alphas: &[f64]) -> Result<Sweeps> {
    let off = llt::wing_polar_sweep(&inputs.control, &inputs.polar, None, &inputs.cond, &cfg.llt, alphas)?;
    let on = inputs
        .slip
        .as_ref()
        .map(|s| llt::wing_polar_sweep(&inputs.control, &inputs.polar, Some(s), &inputs.cond, &cfg.llt, alphas))
        .transpose()?;
    Ok((on, off))
}

fn artifact_files(
    cfg: &CaseConfig,
    inputs: &CaseInputs,
    result: &OptimisationResult,
    on: Option<&[WingPolarPoint]>,
    off: &[WingPolarPoint],
) -> Vec<(String, String)> {
    let mut files = vec![
        ("planform_control.csv".to_string(), inputs.control.to_csv()),
        ("planform_opt.csv".to_string(), result.planform_opt.to_csv()),
        ("spanwise_control.csv".to_string(), inputs.control_sol.spanwise_csv()),
        ("spanwise_opt.csv".to_string(), result.sol_opt.spanwise_csv()),
        ("history.csv".to_string(), result.history_csv()),
        ("polar_sweep_prop_off.csv".to_string(), llt::polar_sweep_csv(off)),
    ];
    if let Some(on) = on {
        files.push(("polar_sweep_prop_on.csv".to_string(), llt::polar_sweep_csv(on)));
    }
    files.push((
        "planform.svg".to_string(),
        planform_svg(&cfg.name, &inputs.control, &result.planform_opt),
    ));
    files.push((
        "circulation.svg".to_string(),
        circulation_svg(&cfg.name, &inputs.control_sol, &result.sol_opt),
    ));
    files
}

fn write_all(dir: &Path, files: &[(String, String)], report: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(p, e))
    };
    for (name, body) in files {
        write(name, body)?;
    }
    write("report.txt", report)
}

fn outline(p: &WingPlanform) -> Vec<(f64, f64)> {
    let snap = p.snapshot(EXPORT_STATIONS);
    let n = snap.y.len();
    let mut le = Vec::with_capacity(2 * n);
    let mut te = Vec::with_capacity(2 * n);
    for i in (0..n).rev() {
        le.push((-snap.y[i], 0.25 * snap.chord[i]));
        te.push((-snap.y[i], -0.75 * snap.chord[i]));
    }
    for i in 1..n {
        le.push((snap.y[i], 0.25 * snap.chord[i]));
        te.push((snap.y[i], -0.75 * snap.chord[i]));
    }
    te.reverse();
    le.extend(te);
    le
}

/// Planform outlines drawn about a straight quarter-chord line.
pub fn planform_svg(name: &str, control: &WingPlanform, opt: &WingPlanform) -> String {
    svg::plot(
        &format!("{name}: planform about the quarter-chord line"),
        "y [m]",
        "x [m]",
        &[
            Series {
                label: "control",
                points: outline(control),
                closed: true,
            },
            Series {
                label: "optimised",
                points: outline(opt),
                closed: true,
            },
        ],
        true,
    )
}

pub fn circulation_svg(name: &str, control: &LltSolution, opt: &LltSolution) -> String {
    let pts = |s: &LltSolution| {
        let k = 1.0 / (s.v_inf * s.semi_span);
        s.y.iter().zip(&s.gamma).map(|(y, g)| (*y, g * k)).collect()
    };
    svg::plot(
        &format!("{name}: circulation"),
        "y [m]",
        "gamma / (V s)",
        &[
            Series {
                label: "control",
                points: pts(control),
                closed: false,
            },
            Series {
                label: "optimised",
                points: pts(opt),
                closed: false,
            },
        ],
        false,
    )
}

/// Case files (`*.cfg`) in a directory, sorted by file name.
pub fn case_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        if p.extension().is_some_and(|x| x == "cfg") {
            files.push(p);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::validation(format!("no .cfg case files in {}", dir.display())));
    }
    Ok(files)
}

/// Runs every case in `dir`. With `out_root`, case `N` writes to
/// `out_root/N`; a `summary.csv` across cases goes to `out_root`.
pub fn run_all(dir: &Path, out_root: Option<&Path>) -> Result<Vec<CaseReport>> {
    let mut reports = Vec::new();
    for path in case_files(dir)? {
        let cfg = CaseConfig::load(&path)?;
        let out = out_root.map_or_else(|| cfg.output_dir.clone(), |r| r.join(&cfg.name));
        reports.push(run_case_in(&cfg, &out)?);
    }
    if let Some(root) = out_root {
        let p = root.join("summary.csv");
        std::fs::write(&p, summary_csv(&reports)).map_err(|e| Error::io(p, e))?;
    }
    Ok(reports)
}

/// One row per case: control and optimised CL, CD and the deltas.
pub fn summary_csv(reports: &[CaseReport]) -> String {
    let mut out = String::from("case,cost,cl_mode,alpha_geo_deg,control_CL,control_CD,opt_CL,opt_CD,dCD_percent,dCL_percent,dCL_CD_percent,converged\n");
    for r in reports {
        let c = &r.inputs.control_sol;
        let o = &r.result.sol_opt;
        let d = &r.result.deltas;
        let mode = match r.config.optimizer.cl_mode {
            ClModeKind::Fixed => "fixed",
            ClModeKind::Band => "band",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.name,
            r.config.optimizer.cost.name(),
            mode,
            r.inputs.cond.alpha_geo.to_degrees(),
            c.cl,
            c.cd,
            o.cl,
            o.cd,
            d.d_cd.percent,
            d.d_cl.percent,
            d.d_endurance,
            r.converged()
        );
    }
    out
}

/// Wing polar sweeps of the control wing with and without the slipstream,
/// written as `polar_sweep_prop_on.csv` and `polar_sweep_prop_off.csv`.
pub fn run_polar_sweep(cfg: &CaseConfig, alpha_deg: [f64; 3], out_dir: &Path) -> Result<Sweeps> {
    let name = cfg.name.as_str();
    let alphas = staged(name, "sweep", llt::alpha_range_deg(alpha_deg[0], alpha_deg[1], alpha_deg[2]))?;
    let inputs = prepare_case(cfg)?;
    let (on, off) = staged(name, "sweep", sweeps(cfg, &inputs, &alphas))?;
    let mut files = vec![("polar_sweep_prop_off.csv".to_string(), llt::polar_sweep_csv(&off))];
    if let Some(on) = &on {
        files.push(("polar_sweep_prop_on.csv".to_string(), llt::polar_sweep_csv(on)));
    }
    staged(name, "write", write_files(out_dir, &files))?;
    Ok((on, off))
}

fn write_files(dir: &Path, files: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, body) in files {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(p, e))?;
    }
    Ok(())
}

/// Inputs of a propeller thrust sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CtSweepSpec {
    pub geometry: PathBuf,
    pub section_polar: PathBuf,
    pub section_reynolds: f64,
    pub rpm: f64,
    pub rho: f64,
    /// `[start, end, step]` of forward speed, m/s.
    pub v_range: [f64; 3],
}

/// `J,CT` sweep at fixed shaft speed; writes `ct_sweep.csv` and
/// `ct_sweep.svg`.
pub fn run_ct_sweep(spec: &CtSweepSpec, out_dir: &Path) -> Result<Vec<(f64, f64)>> {
    let [v0, v1, dv] = spec.v_range;
    if !(dv > 0.0) || !(v1 >= v0) {
        return Err(Error::validation(format!("speed range {v0}..{v1} step {dv} is empty")));
    }
    if !(spec.rpm > 0.0) {
        return Err(Error::validation(format!("shaft speed {} rpm must be positive", spec.rpm)));
    }
    let count = ((v1 - v0) / dv + 1e-9).floor() as usize + 1;
    let speeds: Vec<f64> = (0..count).map(|i| v0 + dv * i as f64).collect();
    let section = polar::load_polar_file(&spec.section_polar, spec.section_reynolds)?;
    let geom = slipstream::load_propeller_file(&spec.geometry, section)?;
    let points = slipstream::ct_sweep(&geom, spec.rpm / 60.0, spec.rho, &speeds)?;
    let mut csv = String::new();
    table::write_rows(&mut csv, "J,CT", points.iter().map(|p| vec![p.0, p.1]));
    let plot = svg::plot(
        &format!("{} at {} rpm", file_name(&spec.geometry), spec.rpm),
        "J",
        "CT",
        &[Series {
            label: "blade-element momentum",
            points: points.clone(),
            closed: false,
        }],
        false,
    );
    write_files(
        out_dir,
        &[("ct_sweep.csv".to_string(), csv), ("ct_sweep.svg".to_string(), plot)],
    )?;
    Ok(points)
}
