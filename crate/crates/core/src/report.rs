//! Text serialisations of boundary curves.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geom::{BoundaryCurve, Window};

/// `x,y` rows for every abscissa where the set is nonempty. Numbers use the
/// shortest representation that parses back to the same double.
pub fn boundary_csv(c: &BoundaryCurve) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in c.defined() {
        writeln!(out, "{},{}", num(x), num(y)).unwrap();
    }
    out
}

/// Parses the output of [`boundary_csv`].
pub fn parse_boundary_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    if lines.next() != Some("x,y") {
        return Err(Error::InvalidParams("missing `x,y` header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (x, y) = l
                .split_once(',')
                .ok_or_else(|| Error::InvalidParams(format!("bad row `{l}`")))?;
            let p = |s: &str| s.parse::<f64>().map_err(|e| Error::InvalidParams(format!("bad number `{s}`: {e}")));
            Ok((p(x)?, p(y)?))
        })
        .collect()
}

/// Negative zero prints as `0`.
fn num(v: f64) -> f64 {
    v + 0.0
}

fn cell(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{}", num(v)))
}

/// `x,oracle_y,closed_y,gap` rows over the shared grid; empty cells where a
/// curve is undefined.
pub fn compare_csv(oracle: &BoundaryCurve, closed: &BoundaryCurve) -> Result<String> {
    if oracle.xs != closed.xs {
        return Err(Error::GridMismatch);
    }
    let mut out = String::from("x,oracle_y,closed_y,gap\n");
    for ((x, a), b) in oracle.xs.iter().zip(&oracle.ys).zip(&closed.ys) {
        let gap = match (a, b) {
            (Some(a), Some(b)) => Some((a - b).abs()),
            (None, None) => Some(0.0),
            _ => Some(f64::INFINITY),
        };
        writeln!(out, "{},{},{},{}", num(*x), cell(*a), cell(*b), cell(gap)).unwrap();
    }
    Ok(out)
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// SVG 1.1 plot: the two axes and one polyline per curve.
pub fn boundary_svg(curves: &[(&str, &BoundaryCurve)], window: Window) -> String {
    let (w, h, pad) = (480.0, 480.0, 20.0);
    let sx = |x: f64| pad + (x - window.x.0) / (window.x.1 - window.x.0).max(f64::MIN_POSITIVE) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - window.y.0) / (window.y.1 - window.y.0).max(f64::MIN_POSITIVE) * (h - 2.0 * pad);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    let x0 = sx(0.0_f64.clamp(window.x.0, window.x.1));
    let y0 = sy(0.0_f64.clamp(window.y.0, window.y.1));
    writeln!(out, r#"  <line class="axis" x1="{pad}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#, w - pad).unwrap();
    writeln!(out, r#"  <line class="axis" x1="{x0}" y1="{pad}" x2="{x0}" y2="{}" stroke="black"/>"#, h - pad).unwrap();
    for (i, (label, c)) in curves.iter().enumerate() {
        let pts: Vec<String> = c.defined().map(|(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
        writeln!(
            out,
            r#"  <polyline data-label="{label}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
