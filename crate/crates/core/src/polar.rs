//! Tabulated aerofoil polars at a single Reynolds number.
//!
//! A polar holds measured `cl(α)` and `cd(α)` rows. Lift for the wing
//! solver comes from a least-squares line through the linear part of the
//! lift curve; drag comes from a `cd(cl)` lookup restricted to the branch of
//! the polar on which `cl` rises monotonically with `α`.

use std::io::Read;

use crate::error::{Error, Result};
use crate::interp;
use crate::table;

/// Default angle window (degrees) for the best-linear-fit lift line.
pub const DEFAULT_BLF_WINDOW_DEG: [f64; 2] = [-2.5, 10.0];

const MIN_ROWS: usize = 4;
const MIN_FIT_SAMPLES: usize = 3;

/// Linear section lift model `cl = a0 (α - α0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearLiftModel {
    /// Lift-curve slope per radian.
    pub a0: f64,
    /// Zero-lift angle in radians.
    pub alpha0: f64,
    /// Angle range (degrees) the line was fitted over.
    pub fit_window_deg: [f64; 2],
}

impl LinearLiftModel {
    pub fn new(a0: f64, alpha0: f64, fit_window_deg: [f64; 2]) -> Result<Self> {
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(Error::Fit(format!("lift-curve slope must be positive, got {a0}")));
        }
        if !alpha0.is_finite() {
            return Err(Error::Fit("zero-lift angle is not finite".into()));
        }
        if !(fit_window_deg[0] < fit_window_deg[1]) {
            return Err(Error::Fit(format!(
                "fit window [{}, {}] is empty",
                fit_window_deg[0], fit_window_deg[1]
            )));
        }
        Ok(Self {
            a0,
            alpha0,
            fit_window_deg,
        })
    }

    /// Thin-aerofoil line `2π (α - α0)` with a nominal ±10° window.
    pub fn thin_aerofoil(alpha0: f64) -> Self {
        Self {
            a0: 2.0 * std::f64::consts::PI,
            alpha0,
            fit_window_deg: [-10.0, 10.0],
        }
    }

    pub fn cl(&self, alpha: f64) -> f64 {
        self.a0 * (alpha - self.alpha0)
    }
}

/// How `cl(α)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftMode {
    /// Piecewise-linear through the table, end-panel slope beyond it.
    Tabulated,
    /// Fitted linear model.
    Blf,
}

/// The monotone-`cl` index range used for `cd(cl)` queries, with the
/// quadratic growth coefficients applied beyond each end.
#[derive(Debug, Clone, PartialEq)]
struct DragBranch {
    lo: usize,
    hi: usize,
    k_lo: f64,
    k_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AerofoilPolar {
    name: String,
    reynolds: f64,
    alpha_deg: Vec<f64>,
    alpha: Vec<f64>,
    cl: Vec<f64>,
    cd: Vec<f64>,
    blf: Option<LinearLiftModel>,
    branch: Option<DragBranch>,
}

impl AerofoilPolar {
    /// Builds a polar from rows in any order. Rows are sorted by angle;
    /// duplicate angles, non-positive drag and short tables are rejected.
    pub fn from_rows(name: &str, reynolds: f64, rows: &[(f64, f64, f64)]) -> Result<Self> {
        if rows.len() < MIN_ROWS {
            return Err(Error::validation(format!(
                "polar `{name}` has {} rows, at least {MIN_ROWS} are required",
                rows.len()
            )));
        }
        if !(reynolds > 0.0) {
            return Err(Error::validation(format!("polar `{name}`: Reynolds number must be positive")));
        }
        let mut rows = rows.to_vec();
        if rows.iter().any(|r| !(r.0.is_finite() && r.1.is_finite() && r.2.is_finite())) {
            return Err(Error::validation(format!("polar `{name}` contains non-finite values")));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::validation(format!(
                "polar `{name}` has duplicate angle of attack {}°",
                w[0].0
            )));
        }
        if let Some(r) = rows.iter().find(|r| !(r.2 > 0.0)) {
            return Err(Error::validation(format!(
                "polar `{name}` has non-positive cd {} at {}°",
                r.2, r.0
            )));
        }

        let alpha_deg: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let cl: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let cd: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let alpha = alpha_deg.iter().map(|a| a.to_radians()).collect();
        let branch = drag_branch(&cl, &cd);
        Ok(Self {
            name: name.to_string(),
            reynolds,
            alpha_deg,
            alpha,
            cl,
            cd,
            blf: None,
            branch,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn reynolds(&self) -> f64 {
        self.reynolds
    }

    pub fn alpha_deg(&self) -> &[f64] {
        &self.alpha_deg
    }

    /// Tabulated angles in radians.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn cl(&self) -> &[f64] {
        &self.cl
    }

    pub fn cd(&self) -> &[f64] {
        &self.cd
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn blf(&self) -> Option<&LinearLiftModel> {
        self.blf.as_ref()
    }

    /// Replaces the linear lift model. The model's window must lie inside
    /// the tabulated angle range.
    pub fn with_blf(mut self, model: LinearLiftModel) -> Result<Self> {
        let (lo, hi) = (self.alpha_deg[0], self.alpha_deg[self.len() - 1]);
        if model.fit_window_deg[0] < lo || model.fit_window_deg[1] > hi {
            return Err(Error::Fit(format!(
                "fit window [{}, {}]° outside tabulated range [{lo}, {hi}]°",
                model.fit_window_deg[0], model.fit_window_deg[1]
            )));
        }
        self.blf = Some(model);
        Ok(self)
    }

    /// Least-squares line through the `(α, cl)` rows inside `window_deg`.
    pub fn fit_blf(&self, window_deg: [f64; 2]) -> Result<LinearLiftModel> {
        let [lo, hi] = window_deg;
        if !(lo < hi) {
            return Err(Error::Fit(format!("fit window [{lo}, {hi}]° is empty")));
        }
        let (amin, amax) = (self.alpha_deg[0], self.alpha_deg[self.len() - 1]);
        if lo < amin || hi > amax {
            return Err(Error::Fit(format!(
                "fit window [{lo}, {hi}]° outside tabulated range [{amin}, {amax}]°"
            )));
        }
        let samples: Vec<(f64, f64)> = self
            .alpha_deg
            .iter()
            .zip(&self.cl)
            .filter(|(a, _)| **a >= lo && **a <= hi)
            .map(|(a, c)| (*a, *c))
            .collect();
        if samples.len() < MIN_FIT_SAMPLES {
            return Err(Error::Fit(format!(
                "{} samples inside [{lo}, {hi}]°, at least {MIN_FIT_SAMPLES} are required",
                samples.len()
            )));
        }
        let n = samples.len() as f64;
        let mean_a = samples.iter().map(|s| s.0).sum::<f64>() / n;
        let mean_c = samples.iter().map(|s| s.1).sum::<f64>() / n;
        let sxx: f64 = samples.iter().map(|s| (s.0 - mean_a).powi(2)).sum();
        let sxy: f64 = samples.iter().map(|s| (s.0 - mean_a) * (s.1 - mean_c)).sum();
        let slope_deg = sxy / sxx;
        if !(slope_deg > 0.0) {
            return Err(Error::Fit(format!(
                "fitted lift slope {slope_deg} per degree is not positive"
            )));
        }
        let intercept = mean_c - slope_deg * mean_a;
        let alpha0_deg = -intercept / slope_deg;
        LinearLiftModel::new(slope_deg.to_degrees(), alpha0_deg.to_radians(), window_deg)
    }

    /// Convenience: fit over `window_deg` and attach the result.
    pub fn fitted(self, window_deg: [f64; 2]) -> Result<Self> {
        let model = self.fit_blf(window_deg)?;
        self.with_blf(model)
    }

    /// Section lift at `alpha` (radians).
    pub fn cl_of_alpha(&self, alpha: f64, mode: LiftMode) -> Result<f64> {
        match mode {
            LiftMode::Tabulated => Ok(interp::lerp(&self.alpha, &self.cl, alpha)),
            LiftMode::Blf => self
                .blf
                .as_ref()
                .map(|m| m.cl(alpha))
                .ok_or_else(|| Error::validation(format!("polar `{}` has no lift fit", self.name))),
        }
    }

    /// Section drag for a lift coefficient, read along the monotone-`cl`
    /// branch; beyond either end drag grows quadratically from the end value.
    pub fn cd_of_cl(&self, cl: f64) -> f64 {
        let Some(b) = &self.branch else {
            return self.cd.iter().copied().fold(f64::INFINITY, f64::min);
        };
        let cls = &self.cl[b.lo..=b.hi];
        let cds = &self.cd[b.lo..=b.hi];
        let (first, last) = (cls[0], cls[cls.len() - 1]);
        if cl < first {
            let d = cl - first;
            cds[0] + b.k_lo * d * d
        } else if cl > last {
            let d = cl - last;
            cds[cds.len() - 1] + b.k_hi * d * d
        } else {
            interp::lerp(cls, cds, cl)
        }
    }

    /// `[cl_min, cl_max]` of the branch used by [`Self::cd_of_cl`].
    pub fn drag_branch_cl_range(&self) -> Option<[f64; 2]> {
        self.branch
            .as_ref()
            .map(|b| [self.cl[b.lo], self.cl[b.hi]])
    }

    /// Quadratic growth coefficients `(k_low, k_high)` used off each end of
    /// the drag branch.
    pub fn drag_extrapolation_coefficients(&self) -> Option<(f64, f64)> {
        self.branch.as_ref().map(|b| (b.k_lo, b.k_hi))
    }
}

/// Picks the longest-α run of strictly increasing `cl` that contains the
/// minimum-drag row; falls back to the longest run when the minimum sits
/// on a non-monotone stretch.
fn drag_branch(cl: &[f64], cd: &[f64]) -> Option<DragBranch> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=cl.len() {
        if i == cl.len() || cl[i] <= cl[i - 1] {
            if i - 1 > start {
                runs.push((start, i - 1));
            }
            start = i;
        }
    }
    let argmin = cd
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)?;
    let (lo, hi) = runs
        .iter()
        .copied()
        .find(|&(lo, hi)| lo <= argmin && argmin <= hi)
        .or_else(|| runs.iter().copied().max_by_key(|&(lo, hi)| (hi - lo, usize::MAX - lo)))?;

    let slope = |i: usize| (cd[i + 1] - cd[i]) / (cl[i + 1] - cl[i]);
    let width = |i: usize| cl[i + 1] - cl[i];
    let growth = |last: usize, prev: Option<usize>| {
        let s_last = slope(last);
        let end_trend = s_last.abs() / (2.0 * width(last));
        match prev {
            Some(p) => {
                let curvature = (s_last - slope(p)).abs() / (width(last) + width(p));
                curvature.max(end_trend)
            }
            None => end_trend,
        }
    };
    let two_panels = hi - lo >= 2;
    let k_lo = growth(lo, two_panels.then_some(lo + 1));
    let k_hi = growth(hi - 1, two_panels.then(|| hi - 2));
    Some(DragBranch { lo, hi, k_lo, k_hi })
}

/// Reads a polar CSV (`alpha_deg,cl,cd`, `#` comments).
pub fn load_polar<R: Read>(source: R, name: &str, reynolds: f64) -> Result<AerofoilPolar> {
    let rows = table::read_table(source, &["alpha_deg", "cl", "cd"])?;
    let rows: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r[0], r[1], r[2])).collect();
    AerofoilPolar::from_rows(name, reynolds, &rows)
}

pub fn load_polar_file(path: &std::path::Path, reynolds: f64) -> Result<AerofoilPolar> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("polar")
        .to_string();
    load_polar(file, &name, reynolds)
}
