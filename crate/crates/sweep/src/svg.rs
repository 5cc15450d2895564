//! Static SVG line plots of sweep columns, log₁₀ on the y axis, with a
//! dashed reference line at log₁₀ = 0 (the g = 1 threshold).

use std::fmt::Write as _;
use std::path::Path;

use blockade::{Error, Result};

use crate::run::{Column, SweepResult};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

/// Renders the plot; returns the document and any warnings it embeds.
pub fn render_svg(result: &SweepResult, columns: &[Column]) -> Result<(String, Vec<String>)> {
    if columns.is_empty() {
        return Err(Error::Plot("no columns selected".into()));
    }
    if result.records.len() < 2 {
        return Err(Error::Plot(format!("cannot plot {} point(s)", result.records.len())));
    }
    let n_axes = result.axes.len();
    if n_axes == 0 || n_axes > 2 || result.records.iter().any(|r| r.coords.len() != n_axes) {
        return Err(Error::Plot("records do not share one sweep axis".into()));
    }

    // one curve per column, split by the second axis value when there is one
    let mut groups: Vec<f64> = Vec::new();
    if n_axes == 2 {
        for r in &result.records {
            if !groups.contains(&r.coords[1]) {
                groups.push(r.coords[1]);
            }
        }
    }
    let mut warnings = Vec::new();
    let mut series = Vec::new();
    for &col in columns {
        if result.records.iter().all(|r| r.value(col).is_none()) {
            warnings.push(format!("column {col} has no defined values and was omitted"));
            continue;
        }
        let subsets: Vec<(String, Option<f64>)> = if groups.is_empty() {
            vec![(col.name().to_string(), None)]
        } else {
            groups.iter().map(|g| (format!("{col} ({}={g})", result.axes[1]), Some(*g))).collect()
        };
        for (label, group) in subsets {
            let points: Vec<(f64, f64)> = result
                .records
                .iter()
                .filter(|r| group.is_none_or(|g| r.coords[1] == g))
                .filter_map(|r| r.value(col).filter(|v| *v > 0.0).map(|v| (r.coords[0], v.log10())))
                .collect();
            if !points.is_empty() {
                series.push(Series { label, points });
            }
        }
    }
    let skipped = result.records.iter().filter(|r| r.failed()).count();
    if skipped > 0 {
        warnings.push(format!("{skipped} failed point(s) left out"));
    }

    let xs = result.records.iter().map(|r| r.coords[0]);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (mut y0, mut y1) = (0.0f64, 0.0f64);
    for s in &series {
        for &(_, y) in &s.points {
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    let (y0, y1) = (y0.floor(), (y1.ceil()).max(y0.floor() + 1.0));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    s.push_str("<metadata>\n");
    for w in &warnings {
        let _ = writeln!(s, "  <warning>{}</warning>", escape(w));
    }
    s.push_str("</metadata>\n");
    if let Some(name) = &result.name {
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(name));
    }
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##);

    for k in 0..=5 {
        let x = x0 + (x1 - x0) * k as f64 / 5.0;
        let px = sx(x);
        let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="#000"/>"##, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 20.0, tick(x));
    }
    let step = ((y1 - y0) / 8.0).ceil().max(1.0);
    let mut y = y0;
    while y <= y1 + 1e-9 {
        let py = sy(y);
        let _ = writeln!(s, r##"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#000"/>"##, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{y}</text>"#, LEFT - 8.0, py + 4.0);
        y += step;
    }
    let _ = writeln!(
        s,
        r##"<line class="reference" x1="{LEFT}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#888" stroke-dasharray="6,4"/>"##,
        sy(0.0),
        LEFT + pw
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0, result.axes[0]);
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">log10</text>"#,
        TOP + ph / 2.0
    );

    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = TOP + 15.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    Ok((s, warnings))
}

pub fn write_svg_plot(result: &SweepResult, columns: &[Column], path: &Path) -> Result<Vec<String>> {
    let (doc, warnings) = render_svg(result, columns)?;
    std::fs::write(path, doc).map_err(|e| Error::io(path, e))?;
    Ok(warnings)
}

fn tick(x: f64) -> String {
    let r = (x * 1000.0).round() / 1000.0;
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
