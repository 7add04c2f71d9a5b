//! Minimal static SVG plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit<'a>(pts: impl Iterator<Item = &'a (f64, f64)>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |a: f64, b: f64| if b - a > 1e-12 { (a, b) } else { (a - 0.5, b + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }
    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(out, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
    let _ = writeln!(out, r#"<text x="{l}" y="{}" >{:.3}</text>"#, b + 16.0, f.x0);
    let _ = writeln!(out, r#"<text x="{r}" y="{}" text-anchor="end">{:.3}</text>"#, b + 16.0, f.x1);
    let _ = writeln!(out, r#"<text x="{}" y="{b}" text-anchor="end">{:.3}</text>"#, l - 4.0, f.y0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, l - 4.0, t + 10.0, f.y1);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Polyline plot of several series with a legend.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let f = Frame::fit(series.iter().flat_map(|s| s.points.iter()));
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &f, xlabel, ylabel);
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        if let Some(&(x, y)) = s.points.first() {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, f.px(x), f.py(y));
        }
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" fill="{color}" text-anchor="end">{}</text>"#,
            W - MARGIN - 6.0,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Grid heatmap; `None` cells are drawn hatched grey.
pub fn heatmap(title: &str, xs: &[f64], ys: &[f64], values: &[Option<f64>]) -> String {
    let pts = [(xs[0], ys[0]), (xs[xs.len() - 1], ys[ys.len() - 1])];
    let f = Frame::fit(pts.iter());
    let mut out = String::new();
    header(&mut out, title);
    let finite: Vec<f64> = values.iter().flatten().copied().collect();
    let vmax = finite.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let cw = (W - 2.0 * MARGIN) / xs.len() as f64;
    let ch = (H - 2.0 * MARGIN) / ys.len() as f64;
    for (j, _) in ys.iter().enumerate() {
        for (i, _) in xs.iter().enumerate() {
            let x = MARGIN + i as f64 * cw;
            let y = H - MARGIN - (j + 1) as f64 * ch;
            let fill = match values[j * xs.len() + i] {
                None => "#bbbbbb".to_string(),
                Some(v) => {
                    // diverging blue–white–red
                    let s = (v / vmax).clamp(-1.0, 1.0);
                    let (r, g, b) = if s >= 0.0 {
                        (255.0, 255.0 * (1.0 - s), 255.0 * (1.0 - s))
                    } else {
                        (255.0 * (1.0 + s), 255.0 * (1.0 + s), 255.0)
                    };
                    format!("rgb({},{},{})", r as u8, g as u8, b as u8)
                }
            };
            let _ = writeln!(out, r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#, cw + 0.05, ch + 0.05);
        }
    }
    axes(&mut out, &f, "x", "y");
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">|max| = {vmax:.3e}</text>"#, W - MARGIN, MARGIN - 6.0);
    out.push_str("</svg>\n");
    out
}
