//! Self-contained SVG 1.1 output: coverage curves and deployment pictures.

use std::fmt::Write as _;
use std::path::Path;

use super::config::Strategy;
use super::reference::ReferenceTable;
use super::sweep::SweepResult;
use crate::error::{Error, Result};
use crate::geometry::{Deployment, SubareaGrid};

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub strategy: Strategy,
    /// `(n, mean coverage fraction)` in ascending n.
    pub points: Vec<(usize, f64)>,
}

/// Mean coverage per strategy and node count, exactly as plotted.
pub fn plot_series(result: &SweepResult) -> Vec<Series> {
    result
        .strategies()
        .into_iter()
        .map(|strategy| Series {
            strategy,
            points: result.summary(strategy).into_iter().map(|(n, s)| (n, s.mean)).collect(),
        })
        .collect()
}

/// Tick positions covering `[lo, hi]` with a 1-2-5 step.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|k| k * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
}

/// Line chart of mean coverage (%) against n, one polyline per strategy.
/// Reference columns are drawn as hollow square markers.
pub fn plot_svg(result: &SweepResult, overlay: &[ReferenceTable]) -> Result<String> {
    let series = plot_series(result);
    if series.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot: the sweep has no rows".into()));
    }
    let (w, h) = (760.0, 480.0);
    let (left, right, top, bottom) = (70.0, 170.0, 30.0, 60.0);
    let xs = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .chain(overlay.iter().flat_map(|t| t.node_counts()));
    let (mut x_lo, mut x_hi) = xs.fold((usize::MAX, 0), |(lo, hi), n| (lo.min(n), hi.max(n)));
    if x_lo == x_hi {
        x_lo = x_lo.saturating_sub(1);
        x_hi += 1;
    }
    let (x_lo, x_hi) = (x_lo as f64, x_hi as f64);
    let px = |n: f64| left + (n - x_lo) / (x_hi - x_lo) * (w - left - right);
    let py = |pct: f64| h - bottom - pct / 100.0 * (h - top - bottom);

    let mut out = String::new();
    header(&mut out, w, h);
    let _ = writeln!(out, "<title>Coverage against number of nodes</title>");
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);

    let _ = writeln!(out, r##"<g class="axes" stroke="#333" stroke-width="1" font-family="sans-serif" font-size="12">"##);
    let _ = writeln!(out, r#"<line x1="{left}" y1="{}" x2="{}" y2="{}"/>"#, py(0.0), w - right, py(0.0));
    let _ = writeln!(out, r#"<line x1="{left}" y1="{}" x2="{left}" y2="{}"/>"#, py(0.0), py(100.0));
    for t in ticks(x_lo, x_hi, 8) {
        let x = px(t);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}"/>"#, py(0.0), py(0.0) + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle" stroke="none">{t}</text>"#, py(0.0) + 18.0);
    }
    for t in ticks(0.0, 100.0, 5) {
        let y = py(t);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}"/>"#, left - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end" stroke="none">{t}</text>"#, left - 8.0, y + 4.0);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{}" text-anchor="middle" stroke="none">Number of nodes (n)</text>"#,
        (left + w - right) / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" stroke="none" transform="rotate(-90 18 {0:.2})">Coverage (%)</text>"#,
        (top + h - bottom) / 2.0
    );
    let _ = writeln!(out, "</g>");

    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(n, m)| format!("{:.2},{:.2}", px(n as f64), py(100.0 * m)))
            .collect();
        let _ = writeln!(out, r#"<g class="series" data-strategy="{}">"#, s.strategy);
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        for &(n, m) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3.5" fill="{colour}" data-n="{n}" data-mean="{m}"/>"#,
                px(n as f64),
                py(100.0 * m)
            );
        }
        let _ = writeln!(out, "</g>");
    }

    for (k, t) in overlay.iter().enumerate() {
        let colour = PALETTE[(series.len() + k) % PALETTE.len()];
        let _ = writeln!(out, r#"<g class="reference" data-table="{}">"#, t.name);
        for (n, v) in t.values() {
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="none" stroke="{colour}" stroke-width="1.5" data-n="{n}" data-value="{v}"/>"#,
                px(n as f64) - 4.0,
                py(100.0 * v) - 4.0
            );
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(out, r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    let lx = w - right + 15.0;
    let mut ly = top + 10.0;
    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, s.strategy);
        ly += 18.0;
    }
    for (k, t) in overlay.iter().enumerate() {
        let colour = PALETTE[(series.len() + k) % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="8" height="8" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            lx + 6.0,
            ly - 4.0
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{} (published)</text>"#, lx + 26.0, ly + 4.0, t.name);
        ly += 18.0;
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_plot(result: &SweepResult, overlay: &[ReferenceTable], path: &Path) -> Result<()> {
    write_file(path, &plot_svg(result, overlay)?)
}

/// Field outline and one sensing disk per sensor at scale, y axis pointing up.
pub fn snapshot_svg(dep: &Deployment, grid: Option<&SubareaGrid>) -> String {
    let field = dep.field();
    let margin = 10.0;
    let scale = 600.0 / field.width().max(field.height());
    let (w, h) = (field.width() * scale + 2.0 * margin, field.height() * scale + 2.0 * margin);
    let sx = |x: f64| margin + x * scale;
    let sy = |y: f64| margin + (field.height() - y) * scale;

    let mut out = String::new();
    header(&mut out, w, h);
    let _ = writeln!(out, "<title>Deployment of {} sensors</title>", dep.len());
    let _ = writeln!(
        out,
        r##"<rect class="field" x="{margin}" y="{margin}" width="{}" height="{}" fill="white" stroke="#000" stroke-width="1"/>"##,
        field.width() * scale,
        field.height() * scale
    );
    if let Some(grid) = grid {
        let _ = writeln!(out, r##"<g class="subareas" stroke="#999" stroke-dasharray="4 3" fill="none">"##);
        for c in &grid.cells {
            let _ = writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                sx(c.x0),
                sy(c.y1),
                c.width() * scale,
                c.height() * scale
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, r##"<g class="sensors" fill="#1f77b4" fill-opacity="0.25" stroke="#1f77b4" stroke-width="0.5">"##);
    for s in dep.sensors() {
        let _ = writeln!(
            out,
            r#"<circle class="sensor" cx="{:.3}" cy="{:.3}" r="{:.3}" data-id="{}"/>"#,
            sx(s.pos.x),
            sy(s.pos.y),
            s.r_s * scale,
            s.id
        );
    }
    let _ = writeln!(out, "</g>");
    let bs = field.base_station();
    let _ = writeln!(
        out,
        r##"<path class="base-station" d="M {0:.3} {1:.3} l 5 9 l -10 0 z" fill="#d62728"/>"##,
        sx(bs.x),
        sy(bs.y) - 6.0
    );
    out.push_str("</svg>\n");
    out
}

pub fn deployment_snapshot(dep: &Deployment, grid: Option<&SubareaGrid>, path: &Path) -> Result<()> {
    write_file(path, &snapshot_svg(dep, grid))
}
