//! Line plots of summary CSVs as standalone SVG.

use std::fmt::Write as _;

use crate::error::{HarnessError, Result};
use crate::experiment::SUMMARY_HEADER;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MeanError,
    MeanSeconds,
}

impl Metric {
    fn label(self) -> &'static str {
        match self {
            Metric::MeanError => "mean relative error",
            Metric::MeanSeconds => "mean seconds",
        }
    }
}

struct Series {
    method: String,
    points: Vec<(f64, f64)>,
}

/// Mean relative error against learner count, one polyline per method.
pub fn emit_plot(summary: &str) -> Result<String> {
    render(summary, Metric::MeanError)
}

/// Mean driver seconds against learner count.
pub fn emit_runtime_plot(summary: &str) -> Result<String> {
    render(summary, Metric::MeanSeconds)
}

pub fn render(summary: &str, metric: Metric) -> Result<String> {
    let series = parse_summary(summary, metric)?;
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y_hi: f64 = 0.0;
    for &(x, y) in all {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_hi = y_hi.max(y);
    }
    if x_hi == x_lo {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let y_hi = if y_hi > 0.0 { y_hi * 1.05 } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_hi * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        metric.label()
    );

    // axes
    let (x0, y0) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        out,
        r#"<path d="M{x0:.2},{TOP:.2} L{x0:.2},{y0:.2} L{:.2},{y0:.2}" fill="none" stroke="black"/>"#,
        LEFT + plot_w
    );
    for x in x_ticks(x_lo, x_hi) {
        let px = sx(x);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            y0 + 5.0,
            y0 + 18.0
        );
    }
    for i in 0..=5 {
        let y = y_hi * i as f64 / 5.0;
        let py = sy(y);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            tick_label(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">learners</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 20.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.method)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn parse_summary(summary: &str, metric: Metric) -> Result<Vec<Series>> {
    let mut lines = summary.lines();
    match lines.next() {
        Some(h) if h.trim_end() == SUMMARY_HEADER => {}
        other => {
            return Err(HarnessError::SchemaMismatch(format!(
                "expected header {SUMMARY_HEADER:?}, got {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut series: Vec<Series> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| HarnessError::SchemaMismatch(format!("line {}: {what}", i + 2));
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 5 {
            return Err(bad("expected 5 fields"));
        }
        let learners: usize = f[1].parse().map_err(|_| bad("learners is not a count"))?;
        let column = match metric {
            Metric::MeanError => 2,
            Metric::MeanSeconds => 4,
        };
        let y: f64 = f[column].parse().map_err(|_| bad("value is not a number"))?;
        if !y.is_finite() {
            return Err(bad("value is not finite"));
        }
        let point = (learners as f64, y);
        match series.iter_mut().find(|s| s.method == f[0]) {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                method: f[0].to_string(),
                points: vec![point],
            }),
        }
    }
    if series.is_empty() {
        return Err(HarnessError::SchemaMismatch("no methods in summary".into()));
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(series)
}

fn x_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1.0);
    let step = (span / 10.0).ceil().max(1.0);
    let mut ticks = Vec::new();
    let mut x = lo.ceil();
    while x <= hi {
        ticks.push(x);
        x += step;
    }
    ticks
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (0.01..1e4).contains(&v.abs()) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
