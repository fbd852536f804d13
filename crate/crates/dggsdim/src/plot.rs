//! Log-log scatter plot of a cover table with its fitted line, as SVG.
//!
//! Hand-rolled rather than pulled from a charting crate: the output must
//! be byte-stable across runs and platforms, which is easier to guarantee
//! with fixed-precision formatting than to audit in a dependency.

use std::fmt::Write as _;

use crate::cover::CoverRecord;
use crate::scaling::ScalingFit;

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 64.0;
const MR: f64 = 20.0;
const MT: f64 = 36.0;
const MB: f64 = 48.0;

struct AxisMap {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl AxisMap {
    fn sx(&self, x: f64) -> f64 {
        ML + (x - self.x0) / (self.x1 - self.x0) * (W - ML - MR)
    }

    fn sy(&self, y: f64) -> f64 {
        H - MB - (y - self.y0) / (self.y1 - self.y0) * (H - MT - MB)
    }
}

/// Tick positions at a "nice" step size covering [lo, hi].
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| span / s <= 6.0)
        .unwrap_or(mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(t);
        t += step;
    }
    out
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

/// Renders the scatter of `(ln delta^-1, ln n_cells)` with the fitted
/// line drawn over the retained resolutions.  Points outside the retained
/// range are drawn hollow.
pub fn scaling_plot(records: &[CoverRecord], fit: Option<&ScalingFit>) -> String {
    let xs: Vec<f64> = records.iter().map(|r| -r.delta_rad.ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| (r.n_cells as f64).ln()).collect();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&x, &y) in xs.iter().zip(&ys) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |a: f64, b: f64| {
        let d = if (b - a).abs() < 1e-12 { 1.0 } else { (b - a) * 0.07 };
        (a - d, b + d)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let m = AxisMap { x0, x1, y0, y1 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);

    for t in ticks(x0, x1) {
        let px = fmt2(m.sx(t));
        let _ = writeln!(
            s,
            r##"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="#ddd"/>"##,
            fmt2(MT),
            fmt2(H - MB)
        );
        let _ = writeln!(
            s,
            r#"<text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
            fmt2(H - MB + 16.0),
            fmt2(t)
        );
    }
    for t in ticks(y0, y1) {
        let py = fmt2(m.sy(t));
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{py}" x2="{}" y2="{py}" stroke="#ddd"/>"##,
            fmt2(ML),
            fmt2(W - MR)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{py}" text-anchor="end" dy="4">{}</text>"#,
            fmt2(ML - 6.0),
            fmt2(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        fmt2(ML),
        fmt2(MT),
        fmt2(W - ML - MR),
        fmt2(H - MT - MB)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">ln (1/delta)</text>"#,
        fmt2((ML + W - MR) / 2.0),
        fmt2(H - 10.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">ln N</text>"#,
        fmt2((MT + H - MB) / 2.0),
        fmt2((MT + H - MB) / 2.0)
    );

    if let Some(fit) = fit {
        let used: Vec<usize> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| fit.resolutions_used.contains(&r.resolution))
            .map(|(i, _)| i)
            .collect();
        if let (Some(&i0), Some(&i1)) = (used.first(), used.last()) {
            let (fx0, fx1) = (xs[i0], xs[i1]);
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c33" stroke-width="1.5"/>"##,
                fmt2(m.sx(fx0)),
                fmt2(m.sy(fit.intercept + fit.d_b * fx0)),
                fmt2(m.sx(fx1)),
                fmt2(m.sy(fit.intercept + fit.d_b * fx1))
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{} d_b = {:.4} (se {:.4})</text>"#,
            fmt2(ML),
            fmt2(MT - 10.0),
            fit.grid.name(),
            fit.d_b,
            fit.se_corrected
        );
    }

    for (i, r) in records.iter().enumerate() {
        let used = fit
            .map(|f| f.resolutions_used.contains(&r.resolution))
            .unwrap_or(true);
        let fill = if used { "#333" } else { "white" };
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="3.5" fill="{fill}" stroke="#333"/>"##,
            fmt2(m.sx(xs[i])),
            fmt2(m.sy(ys[i]))
        );
    }
    s.push_str("</svg>\n");
    s
}
