//! Piecewise-linear table lookup shared by the polar and slipstream tables.

/// Index `i` of the panel `[xs[i], xs[i+1]]` that contains `x`, clamped to
/// the first/last panel. `xs` must be strictly increasing with at least two
/// entries.
pub(crate) fn panel_index(xs: &[f64], x: f64) -> usize {
    debug_assert!(xs.len() >= 2);
    let upper = xs.partition_point(|&v| v <= x);
    upper.clamp(1, xs.len() - 1) - 1
}

/// Linear interpolation on panel `i`; extrapolates along that panel's slope
/// when `x` lies outside it.
pub(crate) fn lerp_on_panel(xs: &[f64], ys: &[f64], i: usize, x: f64) -> f64 {
    let (x0, x1) = (xs[i], xs[i + 1]);
    let (y0, y1) = (ys[i], ys[i + 1]);
    if x == x0 {
        return y0;
    }
    if x == x1 {
        return y1;
    }
    let t = (x - x0) / (x1 - x0);
    y0 + t * (y1 - y0)
}

/// Piecewise-linear interpolation with end-panel slope continuation.
pub(crate) fn lerp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    lerp_on_panel(xs, ys, panel_index(xs, x), x)
}

pub(crate) fn is_strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

/// Trapezoidal rule over arbitrary (strictly increasing) abscissae.
pub(crate) fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}
