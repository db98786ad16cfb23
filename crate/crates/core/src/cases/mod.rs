//! The Avion case studies: configuration, orchestration and output.

pub mod config;
mod runner;
pub mod svg;

pub use config::CaseConfig;
pub use runner::{
    build_control, case_files, circulation_svg, environment, optimisation_spec, planform_svg, prepare_case,
    run_all, run_case, run_case_in, run_ct_sweep, run_polar_sweep, summary_csv, CaseInputs, CaseReport,
    CtSweepSpec,
};
