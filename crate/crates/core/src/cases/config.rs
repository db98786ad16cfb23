//! Case files: `key = value` lines under `[section]` headers, angles in
//! degrees and lengths in metres. File paths are relative to the case file.

use std::path::{Path, PathBuf};

use ini::Ini;

use crate::error::{Error, Result};
use crate::llt::LltSettings;
use crate::optimizer::CostKind;
use crate::slipstream::RotationSense;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSetting {
    /// Fixed geometric angle of attack, rad.
    Fixed(f64),
    /// Trimmed to the design lift coefficient with the slipstream on.
    Trim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSection {
    pub span: f64,
    pub area: f64,
    pub root_chord: Option<f64>,
    pub tip_chord: Option<f64>,
    /// Mean aerodynamic chord used to infer a straight taper when root and
    /// tip chords are not given.
    pub mac: Option<f64>,
    pub washout_deg: f64,
    pub sweep_le_deg: f64,
    pub alpha_geo: AlphaSetting,
    pub design_cl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightSection {
    pub v_inf: f64,
    pub rho: f64,
    pub reynolds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarSection {
    pub file: PathBuf,
    pub reynolds: f64,
    pub blf_window_deg: [f64; 2],
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BemSource {
    pub geometry: PathBuf,
    pub section_polar: PathBuf,
    pub section_reynolds: f64,
    pub rpm: f64,
    pub rotation: RotationSense,
    pub station_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SlipstreamSource {
    None,
    File(PathBuf),
    Bem(BemSource),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlipstreamSection {
    pub source: SlipstreamSource,
    pub prop_y_frac: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClTarget {
    /// The control section's design lift coefficient.
    Design,
    /// The control wing's lift at its operating angle.
    Control,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClModeKind {
    Fixed,
    Band,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSection {
    pub cost: CostKind,
    pub cl_mode: ClModeKind,
    pub cl_target: ClTarget,
    pub band_frac: f64,
    pub twist_bounds_deg: [f64; 2],
    pub chord_bounds_m: [f64; 2],
    pub max_outer_iters: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub name: String,
    pub description: String,
    pub source_path: Option<PathBuf>,
    pub control: ControlSection,
    pub flight: FlightSection,
    pub polar: PolarSection,
    pub slipstream: SlipstreamSection,
    pub optimizer: OptimizerSection,
    pub llt: LltSettings,
    /// `[start, end, step]` of the wing polar sweep, degrees.
    pub sweep_deg: [f64; 3],
    /// Published values, keyed as in the report.
    pub reference: Vec<(String, f64)>,
    pub output_dir: PathBuf,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("", &["name", "description"]),
    (
        "control",
        &[
            "span_m",
            "area_m2",
            "root_chord_m",
            "tip_chord_m",
            "mac_m",
            "washout_deg",
            "sweep_le_deg",
            "alpha_geo_deg",
            "design_cl",
        ],
    ),
    ("flight", &["v_inf_mps", "rho_kgpm3", "reynolds"]),
    ("polar", &["file", "reynolds", "blf_window_deg", "provenance"]),
    (
        "slipstream",
        &[
            "source",
            "file",
            "prop_y_frac",
            "geometry",
            "section_polar",
            "section_reynolds",
            "rpm",
            "rotation",
            "station_x",
            "provenance",
        ],
    ),
    (
        "optimizer",
        &[
            "cost",
            "cl_mode",
            "cl_target",
            "band_frac",
            "twist_bounds_deg",
            "chord_bounds_m",
            "max_outer_iters",
            "tolerance",
        ],
    ),
    ("llt", &["n_collocation", "n_modes"]),
    ("sweep", &["alpha_deg"]),
    ("reference", &[]),
    ("output", &["dir"]),
];

/// Reference keys a case file may quote.
pub const REFERENCE_KEYS: &[&str] = &[
    "alpha_geo_deg",
    "control_CL",
    "control_CDi",
    "control_Cf",
    "control_CD",
    "opt_CL",
    "opt_CD",
    "dCDi_counts",
    "dCDi_percent",
    "dCf_counts",
    "dCf_percent",
    "dCD_counts",
    "dCD_percent",
    "dCL_counts",
    "dCL_percent",
    "dCL_CD_percent",
];

struct Reader<'a> {
    ini: &'a Ini,
    base: &'a Path,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        let name = (!section.is_empty()).then_some(section);
        self.ini.get_from(name, key).map(str::trim)
    }

    fn text(&self, section: &str, key: &str) -> Result<&str> {
        self.raw(section, key)
            .ok_or_else(|| Error::validation(format!("[{section}] `{key}` is missing")))
    }

    fn number(&self, section: &str, key: &str) -> Result<f64> {
        parse_number(section, key, self.text(section, key)?)
    }

    fn number_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        self.raw(section, key)
            .map_or(Ok(default), |v| parse_number(section, key, v))
    }

    fn optional(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.raw(section, key)
            .map(|v| parse_number(section, key, v))
            .transpose()
    }

    fn list<const N: usize>(&self, section: &str, key: &str, default: [f64; N]) -> Result<[f64; N]> {
        let Some(v) = self.raw(section, key) else {
            return Ok(default);
        };
        let parts: Vec<f64> = v
            .split(',')
            .map(|p| parse_number(section, key, p.trim()))
            .collect::<Result<_>>()?;
        parts.try_into().map_err(|p: Vec<f64>| {
            Error::validation(format!("[{section}] `{key}` needs {N} comma-separated values, got {}", p.len()))
        })
    }

    fn path(&self, section: &str, key: &str) -> Result<PathBuf> {
        Ok(self.base.join(self.text(section, key)?))
    }
}

fn parse_number(section: &str, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::validation(format!("[{section}] `{key}` = `{v}` is not a number")))
}

impl CaseConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut cfg = Self::parse(&text, base)?;
        cfg.source_path = Some(path.to_path_buf());
        Ok(cfg)
    }

    /// Parses case text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::Parse {
            line: e.line as u64,
            msg: e.msg.to_string(),
        })?;
        check_keys(&ini)?;
        let r = Reader { ini: &ini, base };

        let name = r.text("", "name")?.to_string();
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(Error::validation(format!("case name `{name}` is empty or contains a path separator")));
        }
        let description = r.raw("", "description").unwrap_or("").to_string();

        let alpha_geo = match r.text("control", "alpha_geo_deg")? {
            "trim" => AlphaSetting::Trim,
            v => AlphaSetting::Fixed(parse_number("control", "alpha_geo_deg", v)?.to_radians()),
        };
        let control = ControlSection {
            span: r.number("control", "span_m")?,
            area: r.number("control", "area_m2")?,
            root_chord: r.optional("control", "root_chord_m")?,
            tip_chord: r.optional("control", "tip_chord_m")?,
            mac: r.optional("control", "mac_m")?,
            washout_deg: r.number_or("control", "washout_deg", 0.0)?,
            sweep_le_deg: r.number_or("control", "sweep_le_deg", 0.0)?,
            alpha_geo,
            design_cl: r.number("control", "design_cl")?,
        };
        if control.root_chord.is_some() != control.tip_chord.is_some() {
            return Err(Error::validation("[control] give both root_chord_m and tip_chord_m, or neither"));
        }
        if control.root_chord.is_none() && control.mac.is_none() {
            return Err(Error::validation("[control] needs root/tip chords or mac_m"));
        }

        let flight = FlightSection {
            v_inf: r.number("flight", "v_inf_mps")?,
            rho: r.number("flight", "rho_kgpm3")?,
            reynolds: r.number_or("flight", "reynolds", 0.0)?,
        };

        let polar = PolarSection {
            file: r.path("polar", "file")?,
            reynolds: r.number("polar", "reynolds")?,
            blf_window_deg: r.list("polar", "blf_window_deg", crate::polar::DEFAULT_BLF_WINDOW_DEG)?,
            provenance: r.raw("polar", "provenance").unwrap_or("unspecified").to_string(),
        };

        let prop_y_frac = r.number_or("slipstream", "prop_y_frac", 0.30)?;
        if !(prop_y_frac > 0.0 && prop_y_frac < 1.0) {
            return Err(Error::validation(format!(
                "[slipstream] prop_y_frac = {prop_y_frac} must lie in (0, 1)"
            )));
        }
        let source = match r.raw("slipstream", "source").unwrap_or("none") {
            "none" => SlipstreamSource::None,
            "file" => SlipstreamSource::File(r.path("slipstream", "file")?),
            "bem" => SlipstreamSource::Bem(BemSource {
                geometry: r.path("slipstream", "geometry")?,
                section_polar: r.path("slipstream", "section_polar")?,
                section_reynolds: r.number_or("slipstream", "section_reynolds", 1e5)?,
                rpm: r.number("slipstream", "rpm")?,
                rotation: r.raw("slipstream", "rotation").unwrap_or("up_inboard").parse()?,
                station_x: r.number_or("slipstream", "station_x", 1.0)?,
            }),
            other => {
                return Err(Error::validation(format!(
                    "[slipstream] source `{other}` is not none, file or bem"
                )))
            }
        };
        let slipstream = SlipstreamSection {
            source,
            prop_y_frac,
            provenance: r.raw("slipstream", "provenance").unwrap_or("unspecified").to_string(),
        };

        let cl_mode = match r.raw("optimizer", "cl_mode").unwrap_or("fixed") {
            "fixed" => ClModeKind::Fixed,
            "band" => ClModeKind::Band,
            other => return Err(Error::validation(format!("[optimizer] cl_mode `{other}` is not fixed or band"))),
        };
        let cl_target = match r.raw("optimizer", "cl_target").unwrap_or("design") {
            "design" => ClTarget::Design,
            "control" => ClTarget::Control,
            v => ClTarget::Value(parse_number("optimizer", "cl_target", v)?),
        };
        let max_outer = r.number_or("optimizer", "max_outer_iters", 12.0)?;
        if max_outer < 1.0 || max_outer.fract() != 0.0 {
            return Err(Error::validation("[optimizer] max_outer_iters must be a positive integer"));
        }
        let optimizer = OptimizerSection {
            cost: r.text("optimizer", "cost")?.parse()?,
            cl_mode,
            cl_target,
            band_frac: r.number_or("optimizer", "band_frac", 0.1)?,
            twist_bounds_deg: r.list("optimizer", "twist_bounds_deg", [-8.0, 8.0])?,
            chord_bounds_m: r.list("optimizer", "chord_bounds_m", [0.05, 0.6])?,
            max_outer_iters: max_outer as usize,
            tolerance: r.number_or("optimizer", "tolerance", 1e-6)?,
        };

        let count = |key: &str, default: usize| -> Result<usize> {
            let v = r.number_or("llt", key, default as f64)?;
            if v < 1.0 || v.fract() != 0.0 {
                return Err(Error::validation(format!("[llt] `{key}` must be a positive integer")));
            }
            Ok(v as usize)
        };
        let defaults = LltSettings::default();
        let llt = LltSettings {
            n_collocation: count("n_collocation", defaults.n_collocation)?,
            n_modes: count("n_modes", defaults.n_modes)?,
        };
        llt.validate()?;

        let sweep_deg = r.list("sweep", "alpha_deg", [-4.0, 8.0, 1.0])?;

        let mut reference = Vec::new();
        if let Some(section) = ini.section(Some("reference")) {
            for (k, v) in section.iter() {
                if !REFERENCE_KEYS.contains(&k) {
                    return Err(Error::validation(format!("[reference] unknown key `{k}`")));
                }
                reference.push((k.to_string(), parse_number("reference", k, v.trim())?));
            }
        }

        let output_dir = match r.raw("output", "dir") {
            Some(d) => base.join(d),
            None => base.join("out").join(&name),
        };

        Ok(Self {
            name,
            description,
            source_path: None,
            control,
            flight,
            polar,
            slipstream,
            optimizer,
            llt,
            sweep_deg,
            reference,
            output_dir,
        })
    }
}

fn check_keys(ini: &Ini) -> Result<()> {
    for (section, props) in ini.iter() {
        let name = section.unwrap_or("");
        let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
            return Err(Error::validation(format!("unknown section [{name}]")));
        };
        if name == "reference" {
            continue;
        }
        if let Some((k, _)) = props.iter().find(|(k, _)| !keys.contains(k)) {
            return Err(Error::validation(format!("unknown key `{k}` in [{name}]")));
        }
    }
    Ok(())
}
