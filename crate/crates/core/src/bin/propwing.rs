#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use propwing::cases::{self, CaseConfig, CtSweepSpec};
use propwing::llt::{self, LltSolver};
use propwing::optimizer::{self, ClMode, CostKind};
use propwing::planform::WingPlanform;
use propwing::polar;
use propwing::slipstream::{self, PropOperatingPoint, PropPlacement, RotationSense};
use propwing::{Error, Result};

#[derive(Parser)]
#[command(name = "propwing", version, about = "Propeller-immersed wing analysis and planform optimisation")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Refuse to run anything that draws random numbers. No code path does;
    /// the flag is kept for scripted pipelines that demand it.
    #[arg(long, global = true)]
    seedless_deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aerofoil polar tools.
    #[command(subcommand)]
    Polar(PolarCmd),
    /// Propeller blade-element momentum tools.
    #[command(subcommand)]
    Prop(PropCmd),
    /// Lifting-line analysis of a case's wing.
    #[command(subcommand)]
    Llt(LltCmd),
    /// Optimise a case's planform without sweeps or plots.
    Optimize(OptimizeArgs),
    /// Run case files end to end.
    #[command(subcommand)]
    Case(CaseCmd),
}

#[derive(Subcommand)]
enum PolarCmd {
    /// Fit the linear lift model over a window.
    Fit {
        polar: PathBuf,
        #[arg(long, default_value_t = 3.0e5)]
        reynolds: f64,
        /// Window bounds, degrees.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [-2.5, 10.0])]
        window: Vec<f64>,
    },
}

#[derive(Args)]
struct PropSource {
    /// Blade geometry CSV.
    #[arg(long)]
    geometry: PathBuf,
    /// Blade section polar CSV.
    #[arg(long)]
    section_polar: PathBuf,
    #[arg(long, default_value_t = 1.0e5)]
    section_reynolds: f64,
    #[arg(long)]
    rpm: f64,
    /// Air density, kg/m^3.
    #[arg(long, default_value_t = 1.225)]
    rho: f64,
}

#[derive(Subcommand)]
enum PropCmd {
    /// Thrust coefficient against advance ratio; writes ct_sweep.csv and ct_sweep.svg.
    CtSweep {
        #[command(flatten)]
        source: PropSource,
        /// Forward speed range, m/s.
        #[arg(long, num_args = 3, value_names = ["START", "END", "STEP"])]
        speed: Vec<f64>,
    },
    /// Slipstream profile behind the disc at one operating point.
    Slipstream {
        #[command(flatten)]
        source: PropSource,
        #[arg(long)]
        v_inf: f64,
        /// Disc centre, m from the root.
        #[arg(long)]
        y_center: f64,
        #[arg(long)]
        semi_span: f64,
        #[arg(long, default_value = "up_inboard")]
        rotation: RotationSense,
        /// Downstream station, diameters.
        #[arg(long, default_value_t = 1.0)]
        station_x: f64,
        /// Output file; defaults to slipstream.csv in the output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LltCmd {
    /// Solve the control wing, or a planform CSV, in a case's environment.
    Solve {
        case: PathBuf,
        /// Planform CSV to solve instead of the control wing.
        #[arg(long)]
        planform: Option<PathBuf>,
        /// Geometric angle of attack, degrees; defaults to the case's operating angle.
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
    },
    /// Prop-on and prop-off wing polar sweeps of the control wing.
    Sweep {
        case: PathBuf,
        /// Angle range, degrees; defaults to the case's `[sweep]` section.
        #[arg(long, num_args = 3, value_names = ["START", "END", "STEP"], allow_negative_numbers = true)]
        alpha: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct OptimizeArgs {
    case: PathBuf,
    /// Override the case's cost function.
    #[arg(long)]
    cost: Option<CostKind>,
    /// Float the lift coefficient within this fraction of the target.
    #[arg(long, conflicts_with = "fixed")]
    band: Option<f64>,
    /// Hold the lift coefficient at the target.
    #[arg(long)]
    fixed: bool,
}

#[derive(Subcommand)]
enum CaseCmd {
    /// Run one or more case files.
    Run {
        #[arg(required = true)]
        cases: Vec<PathBuf>,
    },
    /// Run every `*.cfg` in a directory, in name order.
    RunAll {
        #[arg(default_value = "cases")]
        dir: PathBuf,
    },
}

struct Ui {
    quiet: bool,
}

impl Ui {
    fn print(&self, text: &str) {
        if !self.quiet {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn out_dir(cli_out: &Option<PathBuf>, fallback: &Path) -> PathBuf {
    cli_out.clone().unwrap_or_else(|| fallback.to_path_buf())
}

/// Returns whether every optimisation converged.
fn run(cli: &Cli, ui: &Ui) -> Result<bool> {
    match &cli.command {
        Command::Polar(PolarCmd::Fit {
            polar,
            reynolds,
            window,
        }) => {
            let p = polar::load_polar_file(polar, *reynolds)?;
            let fit = p.fit_blf([window[0], window[1]])?;
            ui.print(&format!(
                "polar={}\nreynolds={}\nwindow_deg={};{}\na0_per_rad={}\nalpha0_deg={}\n",
                p.name(),
                reynolds,
                window[0],
                window[1],
                fit.a0,
                fit.alpha0.to_degrees()
            ));
            Ok(true)
        }
        Command::Prop(PropCmd::CtSweep { source, speed }) => {
            let spec = CtSweepSpec {
                geometry: source.geometry.clone(),
                section_polar: source.section_polar.clone(),
                section_reynolds: source.section_reynolds,
                rpm: source.rpm,
                rho: source.rho,
                v_range: [speed[0], speed[1], speed[2]],
            };
            let dir = out_dir(&cli.out, Path::new("."));
            let points = cases::run_ct_sweep(&spec, &dir)?;
            let mut text = String::from("J,CT\n");
            for (j, ct) in points {
                text.push_str(&format!("{j},{ct}\n"));
            }
            ui.print(&text);
            Ok(true)
        }
        Command::Prop(PropCmd::Slipstream {
            source,
            v_inf,
            y_center,
            semi_span,
            rotation,
            station_x,
            output,
        }) => {
            let section = polar::load_polar_file(&source.section_polar, source.section_reynolds)?;
            let geom = slipstream::load_propeller_file(&source.geometry, section)?;
            let op = PropOperatingPoint::from_rpm(*v_inf, source.rpm, source.rho)?;
            let bem = slipstream::run_bem(&geom, &op)?;
            for w in &bem.warnings {
                warn!("{w}");
            }
            let placement = PropPlacement {
                y_center: *y_center,
                semi_span: *semi_span,
                rotation: *rotation,
                station_x: *station_x,
            };
            let profile = slipstream::slipstream_from_bem(&bem, &geom, &placement)?;
            let j = slipstream::advance_ratio(&op, &geom);
            let ct = bem.thrust_coefficient(&op, &geom);
            let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let body = format!(
                "# blade-element momentum slipstream: geometry {}, section polar {}\n\
                 # rpm={} v_inf_mps={} rho_kgpm3={} y_center_m={} semi_span_m={} rotation={}\n\
                 # J={j} CT={ct} thrust_N={}\n{}",
                name(&source.geometry),
                name(&source.section_polar),
                source.rpm,
                v_inf,
                source.rho,
                y_center,
                semi_span,
                rotation,
                bem.thrust,
                profile.to_csv()
            );
            let path = output
                .clone()
                .unwrap_or_else(|| out_dir(&cli.out, Path::new(".")).join("slipstream.csv"));
            write_file(&path, &body)?;
            ui.print(&format!(
                "J={j}\nCT={ct}\nthrust_N={}\ntorque_Nm={}\nwritten={}\n",
                bem.thrust,
                bem.torque,
                path.display()
            ));
            Ok(true)
        }
        Command::Llt(LltCmd::Solve {
            case,
            planform,
            alpha,
        }) => {
            let cfg = CaseConfig::load(case)?;
            let inputs = cases::prepare_case(&cfg)?;
            let wing = match planform {
                Some(p) => {
                    let f = std::fs::File::open(p).map_err(|source| Error::Io {
                        path: p.clone(),
                        source,
                    })?;
                    WingPlanform::from_csv(f)?
                }
                None => inputs.control,
            };
            let alpha = alpha.map_or(inputs.cond.alpha_geo, f64::to_radians);
            let solver = LltSolver::new(cfg.llt)?;
            let sol = solver
                .prepare(&wing, &inputs.polar, inputs.slip.as_ref(), &inputs.cond)?
                .solve(alpha)?;
            for w in &sol.warnings {
                warn!("{w}");
            }
            if let Some(dir) = &cli.out {
                write_file(&dir.join("spanwise.csv"), &sol.spanwise_csv())?;
            }
            ui.print(&format!(
                "alpha_geo_deg={}\nCL={}\nCDi={}\nCf={}\nCD={}\nCL_CD={}\n",
                alpha.to_degrees(),
                sol.cl,
                sol.cdi,
                sol.cf,
                sol.cd,
                sol.cl / sol.cd
            ));
            Ok(true)
        }
        Command::Llt(LltCmd::Sweep { case, alpha }) => {
            let cfg = CaseConfig::load(case)?;
            let range = alpha.as_ref().map_or(cfg.sweep_deg, |a| [a[0], a[1], a[2]]);
            let dir = out_dir(&cli.out, &cfg.output_dir);
            let (on, off) = cases::run_polar_sweep(&cfg, range, &dir)?;
            ui.print(&format!("prop_off:\n{}", llt::polar_sweep_csv(&off)));
            if let Some(on) = on {
                ui.print(&format!("prop_on:\n{}", llt::polar_sweep_csv(&on)));
            }
            Ok(true)
        }
        Command::Optimize(args) => {
            let cfg = CaseConfig::load(&args.case)?;
            let inputs = cases::prepare_case(&cfg)?;
            let mut spec = cases::optimisation_spec(&cfg, &inputs);
            if let Some(cost) = args.cost {
                spec.cost = cost;
            }
            let target = match spec.cl_mode {
                ClMode::Fixed(t) | ClMode::Band { center: t, .. } => t,
            };
            if args.fixed {
                spec.cl_mode = ClMode::Fixed(target);
            } else if let Some(frac) = args.band {
                spec.cl_mode = ClMode::Band { center: target, frac };
            }
            let result = optimizer::optimize(&inputs.control, &spec, &cases::environment(&cfg, &inputs))?;
            let dir = out_dir(&cli.out, &cfg.output_dir);
            let mut opt = result.planform_opt;
            opt.alpha_geo = inputs.cond.alpha_geo;
            write_file(&dir.join("planform_opt.csv"), &opt.to_csv())?;
            write_file(&dir.join("spanwise_opt.csv"), &result.sol_opt.spanwise_csv())?;
            write_file(&dir.join("history.csv"), &result.history_csv())?;
            ui.print(&result.summary());
            Ok(result.converged)
        }
        Command::Case(CaseCmd::Run { cases: files }) => {
            let mut ok = true;
            for path in files {
                let cfg = CaseConfig::load(path)?;
                let dir = cli.out.as_ref().map_or_else(|| cfg.output_dir.clone(), |o| o.join(&cfg.name));
                let report = cases::run_case_in(&cfg, &dir)?;
                ui.print(&report.to_text());
                ok &= report.converged();
            }
            Ok(ok)
        }
        Command::Case(CaseCmd::RunAll { dir }) => {
            let reports = cases::run_all(dir, cli.out.as_deref())?;
            ui.print(&cases::summary_csv(&reports));
            Ok(reports.iter().all(|r| r.converged()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    if cli.seedless_deterministic {
        info!("seedless deterministic mode: no random number generation is used");
    }
    let ui = Ui { quiet: cli.quiet };
    match run(&cli, &ui) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: optimisation did not converge");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
