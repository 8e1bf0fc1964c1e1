//! Minimal self-contained SVG line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f",
];

/// A named polyline; `faint` series are drawn thin and translucent.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    pub faint: bool,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        (x0, x1) = (x0 - 0.5, x0 + 0.5);
    }
    if !(y0 < y1) {
        (y0, y1) = (y0 - 0.5, y0 + 0.5);
    }
    (x0, x1, y0, y1)
}

pub fn line_plot(title: &str, series: &[Series]) -> String {
    let (x0, x1, y0, y1) = bounds(series);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (x, anchor, label) in [(MARGIN, "start", x0), (WIDTH - MARGIN, "end", x1)] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}">{label:.3}</text>"#,
            HEIGHT - MARGIN + 16.0
        );
    }
    for (y, label) in [(HEIGHT - MARGIN, y0), (MARGIN, y1)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" text-anchor="end">{label:.3}</text>"#,
            MARGIN - 4.0
        );
    }
    let mut legend = 0;
    for (k, s) in series.iter().enumerate() {
        let color = if s.faint {
            "#999999"
        } else {
            PALETTE[k % PALETTE.len()]
        };
        let (width, opacity) = if s.faint { (0.6, 0.5) } else { (1.8, 1.0) };
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{width}" stroke-opacity="{opacity}" points="{}"/>"#,
            pts.join(" ")
        );
        if !s.faint && !s.label.is_empty() {
            let y = MARGIN + 14.0 + 14.0 * legend as f64;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{y}" fill="{color}">{}</text>"#,
                MARGIN + 6.0,
                escape(s.label)
            );
            legend += 1;
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
