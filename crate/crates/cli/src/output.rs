//! CSV writing and CSV-driven SVG plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::registry::Outcome;

pub const HEADER: [&str; 6] = ["experiment", "paper_anchor", "parameter", "t", "metric", "value"];

/// 17 significant digits; `.` as decimal separator regardless of locale.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn optional(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

pub fn write_csv(path: &Path, experiment: &str, anchor: &str, outcome: &Outcome) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(HEADER)?;
    for row in &outcome.rows {
        w.write_record([
            experiment,
            anchor,
            &optional(row.parameter),
            &optional(row.t),
            &row.metric,
            &number(row.value),
        ])?;
    }
    for flag in &outcome.flags {
        w.write_record([experiment, anchor, "", "", flag.metric(), &number(1.0)])?;
    }
    w.flush()?;
    Ok(())
}

struct Series {
    title: String,
    points: Vec<(f64, f64)>,
}

/// Series keyed by `(metric, t)` from the rows that carry a parameter.
fn read_series(path: &Path) -> csv::Result<(String, Vec<Series>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut experiment = String::new();
    let mut groups: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        experiment = record[0].to_string();
        let (Ok(x), Ok(y)) = (record[2].parse::<f64>(), record[5].parse::<f64>()) else {
            continue;
        };
        if x.is_finite() && y.is_finite() {
            groups
                .entry((record[4].to_string(), record[3].to_string()))
                .or_default()
                .push((x, y));
        }
    }
    let series = groups
        .into_iter()
        .filter(|(_, pts)| pts.len() >= 2)
        .map(|((metric, t), points)| {
            let title = match t.parse::<f64>() {
                Ok(t) => format!("{metric} (t = {t})"),
                Err(_) => metric,
            };
            Series { title, points }
        })
        .collect();
    Ok((experiment, series))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Maps data to `[lo, hi]` pixels, logarithmically when every value is positive.
struct Axis {
    log: bool,
    min: f64,
    max: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64> + Clone) -> Self {
        let log = values.clone().all(|v| v > 0.0);
        let f = |v: f64| if log { v.log10() } else { v };
        let (mut min, mut max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(f(v)), b.max(f(v)))
        });
        if max - min < 1e-300 {
            min -= 0.5;
            max += 0.5;
        }
        Self { log, min, max }
    }

    fn map(&self, v: f64, lo: f64, hi: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        lo + (v - self.min) / (self.max - self.min) * (hi - lo)
    }

    fn label(&self, end: f64) -> String {
        let v = if self.log { 10f64.powf(end) } else { end };
        format!("{v:.3e}")
    }
}

const WIDTH: f64 = 560.0;
const PANEL: f64 = 260.0;

/// Writes one panel per series of the CSV at `csv_path`; returns the number of panels.
pub fn plot_csv(csv_path: &Path, svg_path: &Path) -> std::io::Result<usize> {
    let (experiment, series) = read_series(csv_path).map_err(std::io::Error::other)?;
    let height = 40.0 + PANEL * series.len().max(1) as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="10" y="22" font-size="14">{}</text>"#,
        escape(&experiment)
    );
    for (i, s) in series.iter().enumerate() {
        let top = 40.0 + PANEL * i as f64;
        let (left, right, y0, y1) = (80.0, WIDTH - 20.0, top + PANEL - 40.0, top + 24.0);
        let xs = Axis::new(s.points.iter().map(|p| p.0));
        let ys = Axis::new(s.points.iter().map(|p| p.1));
        let _ = writeln!(
            svg,
            r#"<text x="{left}" y="{}">{}</text>"#,
            top + 14.0,
            escape(&s.title)
        );
        let _ = writeln!(
            svg,
            r#"<path d="M{left} {y1} L{left} {y0} L{right} {y0}" stroke="black" fill="none"/>"#
        );
        let scale = |a: &Axis| if a.log { " (log)" } else { "" };
        let _ = writeln!(svg, r#"<text x="{left}" y="{}">{}</text>"#, y0 + 14.0, xs.label(xs.min));
        let _ = writeln!(
            svg,
            r#"<text x="{right}" y="{}" text-anchor="end">{}{}</text>"#,
            y0 + 14.0,
            xs.label(xs.max),
            scale(&xs)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y0}" text-anchor="end">{}</text>"#,
            left - 4.0,
            ys.label(ys.min)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{}{}</text>"#,
            left - 4.0,
            y1 + 8.0,
            ys.label(ys.max),
            scale(&ys)
        );
        let mut points = s.points.clone();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", xs.map(x, left, right), ys.map(y, y0, y1)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" stroke="steelblue" fill="none"/>"#,
            coords.join(" ")
        );
        for c in &coords {
            let (x, y) = c.split_once(',').expect("formatted pair");
            let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="steelblue"/>"#);
        }
    }
    svg.push_str("</svg>\n");
    std::fs::write(svg_path, svg)?;
    Ok(series.len())
}
