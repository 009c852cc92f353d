//! Minimal self-contained SVG charts. Output depends only on the inputs,
//! so reruns produce identical files.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf",
];

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
}

/// Finite min and max, widened when flat.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str) {
        let (x0, x1) = (MARGIN, WIDTH - MARGIN);
        let (y0, y1) = (HEIGHT - MARGIN, MARGIN);
        let _ = writeln!(
            out,
            r#"<path d="M{x0:.1},{y1:.1} L{x0:.1},{y0:.1} L{x1:.1},{y0:.1}" stroke="black" fill="none"/>"#
        );
        for (v, anchor_x) in [(self.x.0, x0), (self.x.1, x1)] {
            let _ = writeln!(
                out,
                r#"<text x="{anchor_x:.1}" y="{:.1}" text-anchor="middle">{v:.2}</text>"#,
                y0 + 15.0
            );
        }
        for (v, anchor_y) in [(self.y.0, y0), (self.y.1, y1)] {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{anchor_y:.1}" text-anchor="end">{v:.2}</text>"#,
                x0 - 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(y_label)
        );
    }
}

fn legend(out: &mut String, entries: &[(String, &str, bool)]) {
    for (i, (label, stroke, dashed)) in entries.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        let x = WIDTH - MARGIN - 150.0;
        let dash = if *dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{stroke}" stroke-width="2"{dash}/>"#,
            x + 20.0
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x + 25.0, y + 4.0, escape(label));
    }
}

pub struct Line {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub values: Vec<f64>,
}

/// Lines over an evenly spaced x axis covering one day in hours.
pub fn line_chart(title: &str, y_label: &str, lines: &[Line]) -> String {
    let mut out = String::new();
    header(&mut out, WIDTH, HEIGHT, title);
    let frame = Frame {
        x: (0.0, 24.0),
        y: range(lines.iter().flat_map(|l| l.values.iter().copied())),
    };
    frame.axes(&mut out, "hour of day", y_label);
    for line in lines {
        let n = line.values.len().max(2) as f64;
        let mut d = String::new();
        for (i, v) in line.values.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let cmd = if d.is_empty() { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{:.1},{:.1} ", frame.px(24.0 * i as f64 / n), frame.py(*v));
        }
        let dash = if line.dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<path d="{}" stroke="{}" stroke-width="1.5" fill="none"{dash}/>"#,
            d.trim_end(),
            line.color
        );
    }
    let entries: Vec<_> = lines.iter().map(|l| (l.label.clone(), l.color, l.dashed)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Scatter plot coloured by label.
pub fn scatter(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64, usize)]) -> String {
    let mut out = String::new();
    header(&mut out, WIDTH, HEIGHT, title);
    let frame = Frame {
        x: range(points.iter().map(|p| p.0)),
        y: range(points.iter().map(|p| p.1)),
    };
    frame.axes(&mut out, x_label, y_label);
    for &(x, y, label) in points {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="{}" fill-opacity="0.8"/>"#,
            frame.px(x),
            frame.py(y),
            color(label)
        );
    }
    let mut labels: Vec<usize> = points.iter().map(|p| p.2).collect();
    labels.sort_unstable();
    labels.dedup();
    let entries: Vec<_> = labels
        .iter()
        .map(|&l| (format!("cluster {l}"), color(l), false))
        .collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Square heat map of values in [0, 1]; `None` cells are left blank.
pub fn heatmap(title: &str, labels: &[String], cells: &[Vec<Option<f64>>]) -> String {
    let n = labels.len();
    let cell = 70.0;
    let left = 110.0;
    let top = 40.0;
    let width = left + cell * n as f64 + 20.0;
    let height = top + cell * n as f64 + 90.0;
    let mut out = String::new();
    header(&mut out, width, height, title);
    for (i, row) in cells.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let x = left + cell * j as f64;
            let y = top + cell * i as f64;
            match v {
                Some(v) => {
                    // white to dark blue
                    let t = v.clamp(0.0, 1.0);
                    let channel = |hi: f64, lo: f64| (hi + (lo - hi) * t).round() as u8;
                    let fill = format!("#{:02x}{:02x}{:02x}", channel(255.0, 8.0), channel(255.0, 48.0), channel(255.0, 107.0));
                    let text = if t > 0.5 { "white" } else { "black" };
                    let _ = writeln!(
                        out,
                        r#"<rect x="{x:.1}" y="{y:.1}" width="{cell:.1}" height="{cell:.1}" fill="{fill}" stroke="white"/>"#
                    );
                    let _ = writeln!(
                        out,
                        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" fill="{text}">{v:.2}</text>"#,
                        x + cell / 2.0,
                        y + cell / 2.0 + 4.0
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        r##"<rect x="{x:.1}" y="{y:.1}" width="{cell:.1}" height="{cell:.1}" fill="#f0f0f0" stroke="white"/>"##
                    );
                }
            }
        }
    }
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            left - 6.0,
            top + cell * i as f64 + cell / 2.0 + 4.0,
            escape(label)
        );
        let x = left + cell * i as f64 + cell / 2.0;
        let y = top + cell * n as f64 + 10.0;
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="end" transform="rotate(-45 {x:.1} {y:.1})">{}</text>"#,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}
