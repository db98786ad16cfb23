//! Minimal SVG line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 56.0;
const COLOURS: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e8b57", "#7f7f7f"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Closed outline instead of an open line.
    pub closed: bool,
}

struct Frame {
    x: [f64; 2],
    y: [f64; 2],
}

impl Frame {
    fn around(series: &[Series], equal_aspect: bool) -> Self {
        let mut x = [f64::INFINITY, f64::NEG_INFINITY];
        let mut y = x;
        for p in series.iter().flat_map(|s| &s.points) {
            x = [x[0].min(p.0), x[1].max(p.0)];
            y = [y[0].min(p.1), y[1].max(p.1)];
        }
        let pad = |r: [f64; 2]| {
            let span = r[1] - r[0];
            let d = if span > 0.0 { 0.05 * span } else { 0.5 * r[0].abs().max(1.0) };
            [r[0] - d, r[1] + d]
        };
        let (mut x, mut y) = (pad(x), pad(y));
        if equal_aspect {
            let sx = (x[1] - x[0]) / (WIDTH - 2.0 * MARGIN);
            let sy = (y[1] - y[0]) / (HEIGHT - 2.0 * MARGIN);
            let s = sx.max(sy);
            let grow = |r: [f64; 2], px: f64| {
                let mid = 0.5 * (r[0] + r[1]);
                [mid - 0.5 * s * px, mid + 0.5 * s * px]
            };
            x = grow(x, WIDTH - 2.0 * MARGIN);
            y = grow(y, HEIGHT - 2.0 * MARGIN);
        }
        Self { x, y }
    }

    fn px(&self, p: (f64, f64)) -> (f64, f64) {
        let u = MARGIN + (p.0 - self.x[0]) / (self.x[1] - self.x[0]) * (WIDTH - 2.0 * MARGIN);
        let v = HEIGHT - MARGIN - (p.1 - self.y[0]) / (self.y[1] - self.y[0]) * (HEIGHT - 2.0 * MARGIN);
        (u, v)
    }
}

/// Line plot with axes, five ticks per axis and a legend.
pub fn plot(title: &str, x_label: &str, y_label: &str, series: &[Series], equal_aspect: bool) -> String {
    let f = Frame::around(series, equal_aspect);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.1} {:.1} V{y0:.1} H{:.1}" fill="none" stroke="black"/>"#,
        MARGIN,
        WIDTH - MARGIN
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = f.x[0] + t * (f.x[1] - f.x[0]);
        let yv = f.y[0] + t * (f.y[1] - f.y[0]);
        let (u, _) = f.px((xv, f.y[0]));
        let (_, v) = f.px((f.x[0], yv));
        let _ = writeln!(
            s,
            r#"<line x1="{u:.1}" y1="{y0:.1}" x2="{u:.1}" y2="{:.1}" stroke="black"/><text x="{u:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y0 + 4.0,
            y0 + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{v:.1}" x2="{x0:.1}" y2="{v:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            x0 - 6.0,
            v + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let mut d = String::new();
        for (j, p) in ser.points.iter().enumerate() {
            let (u, v) = f.px(*p);
            let _ = write!(d, "{}{u:.2} {v:.2} ", if j == 0 { "M" } else { "L" });
        }
        if ser.closed {
            d.push('Z');
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        let ly = MARGIN + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            WIDTH - MARGIN - 130.0,
            WIDTH - MARGIN - 124.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    format!("{v:.3}")
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
