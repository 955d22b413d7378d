//! Static line plots as SVG 1.1.
//!
//! All coordinates are printed with a fixed number of decimals, so identical
//! input gives identical bytes.

use std::fmt::Write;

use crate::error::{CliError, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    LogX,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgPlot {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_label: String,
    pub y_label: String,
    pub caption: String,
    pub scale: Scale,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if (1e-3..1e5).contains(&v.abs()) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// `[lo, hi]` widened when it is a single point.
fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if lo < hi {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        (lo - pad, hi + pad)
    }
}

pub fn emit_svg(plot: &SvgPlot) -> Result<String> {
    if plot.x.is_empty() {
        return Err(CliError::Usage("cannot plot an empty series".into()));
    }
    if plot.x.len() != plot.y.len() {
        return Err(CliError::Usage(format!(
            "series lengths differ: {} x values, {} y values",
            plot.x.len(),
            plot.y.len()
        )));
    }
    if plot.x.iter().chain(&plot.y).any(|v| !v.is_finite()) {
        return Err(CliError::Usage("series contains non-finite values".into()));
    }
    let log = plot.scale == Scale::LogX;
    if log && plot.x.iter().any(|&x| x <= 0.0) {
        return Err(CliError::Usage("log-x scale needs positive x".into()));
    }
    let tx = |x: f64| if log { x.log10() } else { x };
    let (x0, x1) = span(plot.x.iter().map(|&x| tx(x)));
    let (y0, y1) = span(plot.y.iter().copied());
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let w = &mut s;
    // writing to a String cannot fail
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(w, r#"<g font-family="sans-serif" font-size="12">"#);
    for i in 0..TICKS {
        let t = i as f64 / (TICKS - 1) as f64;
        let xv = x0 + t * (x1 - x0);
        let xpix = LEFT + t * pw;
        let label = if log {
            tick_label(10f64.powf(xv))
        } else {
            tick_label(xv)
        };
        let _ = writeln!(
            w,
            r#"<line x1="{xpix:.2}" y1="{:.2}" x2="{xpix:.2}" y2="{:.2}" stroke="black"/><text x="{xpix:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            escape(&label)
        );
        let yv = y0 + t * (y1 - y0);
        let ypix = TOP + (1.0 - t) * ph;
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{ypix:.2}" x2="{LEFT}" y2="{ypix:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            ypix + 4.0,
            escape(&tick_label(yv))
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let z = py(0.0);
        let _ = writeln!(
            w,
            r#"<line x1="{LEFT}" y1="{z:.2}" x2="{:.2}" y2="{z:.2}" stroke="gray" stroke-dasharray="4 4"/>"#,
            LEFT + pw
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        TOP + ph + 40.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 8.0,
        escape(&plot.caption)
    );
    let _ = writeln!(w, "</g>");
    let _ = write!(
        w,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="0.8" points=""#
    );
    for (i, (&x, &y)) in plot.x.iter().zip(&plot.y).enumerate() {
        if i > 0 {
            w.push(' ');
        }
        let _ = write!(w, "{:.2},{:.2}", px(x), py(y));
    }
    let _ = writeln!(w, r#""/>"#);
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(x: Vec<f64>, y: Vec<f64>) -> SvgPlot {
        SvgPlot {
            x,
            y,
            x_label: "n".into(),
            y_label: "y".into(),
            caption: "a < b & c".into(),
            scale: Scale::Linear,
        }
    }

    #[test]
    fn two_points_make_one_segment() {
        let s = emit_svg(&plot(vec![1.0, 2.0], vec![0.0, 1.0])).unwrap();
        assert_eq!(s.matches("<polyline").count(), 1);
        let pts = s
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        assert_eq!(pts.split(' ').count(), 2);
        assert!(s.contains("a &lt; b &amp; c"));
    }

    #[test]
    fn empty_series_is_rejected() {
        assert!(matches!(
            emit_svg(&plot(vec![], vec![])),
            Err(CliError::Usage(_))
        ));
        assert!(emit_svg(&plot(vec![1.0], vec![f64::NAN])).is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let x: Vec<f64> = (1..500).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let mut p = plot(x, y);
        p.scale = Scale::LogX;
        assert_eq!(emit_svg(&p).unwrap(), emit_svg(&p.clone()).unwrap());
    }

    #[test]
    fn constant_series_gets_a_range() {
        let s = emit_svg(&plot(vec![3.0], vec![7.0])).unwrap();
        assert!(!s.contains("NaN"));
    }
}
