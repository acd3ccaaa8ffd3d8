//! Minimal static SVG charts: stacked panels of lines, points and bars
//! with linear axes, optional dashed vertical guides and a legend.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mark {
    Line,
    DashedLine,
    Points,
    /// Bars of the given width in data units, centred on x, rising from 0.
    Bars(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub mark: Mark,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(
        label: impl Into<String>,
        color: &'static str,
        mark: Mark,
        points: Vec<(f64, f64)>,
    ) -> Self {
        Series {
            label: label.into(),
            color,
            mark,
            points,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Dashed vertical guides at these x positions.
    pub guides: Vec<f64>,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 45.0;

/// Renders panels stacked vertically into one SVG document.
pub fn render(panels: &[Panel], width: u32, panel_height: u32) -> String {
    let height = panel_height as usize * panels.len().max(1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">
<rect width="{width}" height="{height}" fill="white"/>"#
    );
    for (k, panel) in panels.iter().enumerate() {
        let top = (k * panel_height as usize) as f64;
        render_panel(&mut out, panel, k, top, width as f64, panel_height as f64);
    }
    out.push_str("</svg>\n");
    out
}

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values
        .filter(|v| v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

fn padded((lo, hi): (f64, f64)) -> (f64, f64) {
    if hi > lo {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    if !(raw > 0.0 && raw.is_finite()) {
        return vec![lo];
    }
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        return format!("{v:.1e}");
    }
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn render_panel(out: &mut String, p: &Panel, index: usize, top: f64, width: f64, height: f64) {
    let all = || p.series.iter().flat_map(|s| s.points.iter());
    let x_range = p
        .x_range
        .or_else(|| extent(all().map(|q| q.0)).map(padded))
        .unwrap_or((0.0, 1.0));
    let y_range = p
        .y_range
        .or_else(|| {
            let bars = p.series.iter().any(|s| matches!(s.mark, Mark::Bars(_)));
            let ys = all().map(|q| q.1).chain(bars.then_some(0.0));
            extent(ys).map(padded)
        })
        .unwrap_or((0.0, 1.0));
    let (x0, x1) = (MARGIN_LEFT, width - MARGIN_RIGHT);
    let (y0, y1) = (top + MARGIN_TOP, top + height - MARGIN_BOTTOM);
    let sx = |x: f64| x0 + (x - x_range.0) / (x_range.1 - x_range.0) * (x1 - x0);
    let sy = |y: f64| y1 - (y - y_range.0) / (y_range.1 - y_range.0) * (y1 - y0);
    let clip = format!("clip{index}");

    let _ = writeln!(
        out,
        r#"<clipPath id="{clip}"><rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        0.5 * (x0 + x1),
        top + 20.0,
        escape(&p.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
        x1 - x0,
        y1 - y0
    );
    for t in ticks(x_range.0, x_range.1, 8) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            y1 + 4.0,
            y1 + 16.0,
            tick_label(t)
        );
    }
    for t in ticks(y_range.0, y_range.1, 5) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0 - 4.0,
            x0 - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        0.5 * (x0 + x1),
        y1 + 34.0,
        escape(&p.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        x0 - 52.0,
        0.5 * (y0 + y1),
        x0 - 52.0,
        0.5 * (y0 + y1),
        escape(&p.y_label)
    );

    let _ = writeln!(out, r#"<g clip-path="url(#{clip})">"#);
    for &g in &p.guides {
        if g >= x_range.0 && g <= x_range.1 {
            let x = sx(g);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="#d62728" stroke-dasharray="5,4"/>"##
            );
        }
    }
    for s in &p.series {
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .copied()
            .filter(|q| q.0.is_finite() && q.1.is_finite())
            .collect();
        match s.mark {
            Mark::Line | Mark::DashedLine => {
                let path: Vec<String> = pts
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                    .collect();
                let dash = if s.mark == Mark::DashedLine {
                    r#" stroke-dasharray="6,4""#
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
                    s.color,
                    path.join(" ")
                );
            }
            Mark::Points => {
                for (x, y) in pts {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
                        sx(x),
                        sy(y),
                        s.color
                    );
                }
            }
            Mark::Bars(w) => {
                for (x, y) in pts {
                    let (left, right) = (sx(x - 0.5 * w), sx(x + 0.5 * w));
                    let (ya, yb) = (sy(y.max(0.0)), sy(y.min(0.0)));
                    let _ = writeln!(
                        out,
                        r#"<rect x="{left:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{}" fill-opacity="0.45"/>"#,
                        (right - left).max(0.5),
                        yb - ya,
                        s.color
                    );
                }
            }
        }
    }
    out.push_str("</g>\n");

    for (k, s) in p.series.iter().filter(|s| !s.label.is_empty()).enumerate() {
        let y = y0 + 14.0 + 16.0 * k as f64;
        let x = x1 - 150.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="12" height="8" fill="{}"/><text x="{:.2}" y="{y:.2}">{}</text>"#,
            y - 8.0,
            s.color,
            x + 16.0,
            escape(&s.label)
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declares_size_and_closes() {
        let p = Panel {
            title: "a < b & c".into(),
            series: vec![Series::new(
                "s",
                PALETTE[0],
                Mark::Line,
                vec![(0.0, 1.0), (1.0, 2.0)],
            )],
            guides: vec![0.5],
            ..Default::default()
        };
        let svg = render(&[p.clone(), p], 640, 300);
        assert!(svg.contains(r#"width="640" height="600""#));
        assert!(svg.contains("a &lt; b &amp; c"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(ticks(0.0, 10.0, 5), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(tick_label(0.25), "0.25");
        assert_eq!(tick_label(2.0e7), "2.0e7");
    }
}
