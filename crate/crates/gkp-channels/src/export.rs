//! Self-contained SVG charts for sweep, decay and Wigner artifacts.

use std::fmt::Write;

const PALETTE: [&str; 6] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"];

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers only, no connecting line.
    pub scatter: bool,
}

impl Curve {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, scatter: false }
    }

    pub fn scatter(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, scatter: true }
    }
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Line chart with linear axes, a legend and tick labels at the data extremes.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, curves: &[Curve]) -> String {
    let (w, h) = (640.0, 420.0);
    let (l, r, t, b) = (80.0, 150.0, 40.0, 50.0);
    let (x0, x1) = bounds(curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)));
    let (y0, y1) = bounds(curves.iter().flat_map(|c| c.points.iter().map(|p| p.1)));
    let px = |x: f64| l + (x - x0) / (x1 - x0) * (w - l - r);
    let py = |y: f64| h - b - (y - y0) / (y1 - y0) * (h - t - b);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, 0.5 * (w - r + l), esc(title));
    let _ = writeln!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, w - l - r, h - t - b);
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, px(fx), h - b + 16.0, tick(fx));
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, py(fy) + 4.0, tick(fy));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, 0.5 * (w - r + l), h - 12.0, esc(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        0.5 * (h - b + t),
        0.5 * (h - b + t),
        esc(y_label)
    );
    for (i, c) in curves.iter().enumerate() {
        let col = PALETTE[i % PALETTE.len()];
        if !c.scatter && c.points.len() > 1 {
            let pts: Vec<String> = c.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{col}" stroke-width="1.5"/>"#, pts.join(" "));
        }
        if c.scatter || c.points.len() == 1 {
            for &(x, y) in &c.points {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{col}"/>"#, px(x), py(y));
            }
        }
        let ly = t + 16.0 + 18.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="12" height="3" fill="{col}"/>"#, w - r + 12.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, w - r + 30.0, esc(&c.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Diverging heatmap (`values[ix][iy]`, y increasing upward) with optional cross markers.
pub fn heatmap(values: &[Vec<f64>], x_range: (f64, f64), y_range: (f64, f64), size: usize, marks: &[(f64, f64)]) -> String {
    let nx = values.len();
    let ny = values.first().map_or(0, |c| c.len());
    let scale = values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let (cw, ch) = (size as f64 / nx.max(1) as f64, size as f64 / ny.max(1) as f64);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    for (i, col) in values.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                i as f64 * cw,
                (ny - 1 - j) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                diverging(v / scale)
            );
        }
    }
    let to_x = |x: f64| (x - x_range.0) / (x_range.1 - x_range.0) * size as f64;
    let to_y = |y: f64| size as f64 - (y - y_range.0) / (y_range.1 - y_range.0) * size as f64;
    for &(x, y) in marks {
        let (cx, cy) = (to_x(x), to_y(y));
        let _ = writeln!(
            s,
            r#"<path d="M{:.1} {:.1} L{:.1} {:.1} M{:.1} {:.1} L{:.1} {:.1}" stroke="white" stroke-width="2"/>"#,
            cx - 5.0,
            cy - 5.0,
            cx + 5.0,
            cy + 5.0,
            cx - 5.0,
            cy + 5.0,
            cx + 5.0,
            cy - 5.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Blue for negative, white at zero, red for positive; `t` in [-1, 1].
fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 { (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t)) } else { (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0) };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
