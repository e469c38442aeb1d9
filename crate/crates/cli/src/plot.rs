//! Standalone SVG 1.1 rendering of a terrain with an optional solution overlay
//! and an optional h-versus-x panel of extreme-viewer curves.

use std::fmt::Write;

use serde_json::Value;
use terrain_guard::envelope::CurveDump;
use terrain_guard::scalar::parse_rational;
use terrain_guard::{Rational, Scalar, Terrain};

use crate::error::CliError;

const WIDTH: f64 = 800.0;
const MAP_HEIGHT: f64 = 400.0;
const CURVE_HEIGHT: f64 = 300.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub enum Overlay {
    Atc { h: f64, guards: Vec<f64> },
    Batc { h: f64, pairs: Vec<(f64, usize, usize)> },
}

fn malformed(what: &str) -> CliError {
    CliError::Invalid(format!("malformed solution JSON: {what}"))
}

fn number(v: &Value, what: &str) -> Result<f64, CliError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(malformed(what)),
    };
    parse_rational(&text)
        .map(|r: Rational| r.to_f64())
        .ok_or_else(|| malformed(what))
}

/// Accepts a full run report or just its `solution` object.
pub fn parse_overlay(text: &str) -> Result<Overlay, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| malformed(&e.to_string()))?;
    let sol = root.get("solution").unwrap_or(&root);
    let h = number(sol.get("h_star").ok_or_else(|| malformed("missing h_star"))?, "h_star")?;
    if let Some(pairs) = sol.get("pairs") {
        let pairs = pairs
            .as_array()
            .ok_or_else(|| malformed("pairs is not an array"))?
            .iter()
            .map(|p| {
                let idx = |k: &str| {
                    p.get(k)
                        .and_then(Value::as_u64)
                        .map(|v| v as usize)
                        .ok_or_else(|| malformed(&format!("pair without {k}")))
                };
                let x = number(
                    p.get("guard_x").ok_or_else(|| malformed("pair without guard_x"))?,
                    "guard_x",
                )?;
                Ok((x, idx("from")?, idx("to")?))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        return Ok(Overlay::Batc { h, pairs });
    }
    let guards = sol
        .get("guards")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("neither guards nor pairs"))?
        .iter()
        .map(|g| number(g, "guard"))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Overlay::Atc { h, guards })
}

pub fn parse_curves(text: &str) -> Result<Vec<CurveDump>, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("malformed curves JSON: {e}")))
}

/// Affine map from data coordinates into a panel.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    top: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (self.height - 2.0 * MARGIN)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let pad = if hi > lo { 0.08 * (hi - lo) } else { 1.0 };
    (lo - pad, hi + pad)
}

fn polyline(points: &[(f64, f64)], f: &Frame, color: &str, extra: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{extra}/>\n",
        coords.join(" ")
    )
}

pub fn render(t: &Terrain<Rational>, overlay: Option<&Overlay>, curves: Option<&[CurveDump]>) -> String {
    let pts: Vec<(f64, f64)> = t.vertices().iter().map(|p| p.to_f64()).collect();
    let (x_lo, x_hi) = (pts[0].0, pts[pts.len() - 1].0);
    let y_top = t.y_max().to_f64();
    let h = match overlay {
        Some(Overlay::Atc { h, .. } | Overlay::Batc { h, .. }) => Some(*h),
        None => None,
    };
    let y_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let (y0, y1) = padded(y_min, h.unwrap_or(y_top).max(y_top));
    let (x0, x1) = padded(x_lo, x_hi);
    let map = Frame {
        x0,
        x1,
        y0,
        y1,
        top: 0.0,
        height: MAP_HEIGHT,
    };
    let total = MAP_HEIGHT + if curves.is_some() { CURVE_HEIGHT } else { 0.0 };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{total}\" viewBox=\"0 0 {WIDTH} {total}\">"
    );
    let _ = writeln!(svg, "  <rect width=\"{WIDTH}\" height=\"{total}\" fill=\"white\"/>");
    svg.push_str(&polyline(&pts, &map, "#333333", ""));

    if let Some(h) = h {
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888888\" stroke-dasharray=\"6,4\"/>",
            map.px(x_lo),
            map.py(h),
            map.px(x_hi),
            map.py(h)
        );
    }
    let marker = |svg: &mut String, x: f64, color: &str| {
        let _ = writeln!(
            svg,
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"{color}\"/>",
            map.px(x),
            map.py(h.unwrap_or(y_top))
        );
    };
    match overlay {
        Some(Overlay::Atc { guards, .. }) => {
            for &g in guards {
                marker(&mut svg, g, PALETTE[0]);
            }
        }
        Some(Overlay::Batc { pairs, .. }) => {
            for (i, &(g, from, to)) in pairs.iter().enumerate() {
                let color = PALETTE[i % PALETTE.len()];
                if from < to && to < pts.len() {
                    svg.push_str(&polyline(&pts[from..=to], &map, color, " stroke-opacity=\"0.8\""));
                }
                marker(&mut svg, g, color);
            }
        }
        None => {}
    }

    if let Some(curves) = curves {
        let finite = curves
            .iter()
            .flat_map(|c| c.pieces.iter().flat_map(|p| [Some(p.lo), p.hi]))
            .flatten()
            .chain(h)
            .fold(y_top, f64::max);
        let h_top = if finite > y_top {
            y_top + 1.25 * (finite - y_top)
        } else {
            y_top + 1.0
        };
        let panel = Frame {
            x0,
            x1,
            y0: y_top,
            y1: h_top,
            top: MAP_HEIGHT,
            height: CURVE_HEIGHT,
        };
        for (i, c) in curves.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut run: Vec<(f64, f64)> = Vec::new();
            for s in 0..=200 {
                let hh = y_top + (h_top - y_top) * f64::from(s) / 200.0;
                match c.eval(hh).filter(|x| x.is_finite()) {
                    Some(x) => run.push((x.clamp(x0, x1), hh)),
                    None if run.len() > 1 => svg.push_str(&polyline(&std::mem::take(&mut run), &panel, color, "")),
                    None => run.clear(),
                }
            }
            if run.len() > 1 {
                svg.push_str(&polyline(&run, &panel, color, ""));
            }
            let _ = writeln!(
                svg,
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
                MARGIN + 40.0 * i as f64,
                MAP_HEIGHT + 16.0,
                c.label
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
