//! SVG plots of the data and the fitted boundary.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::PolarObservation;
use crate::posterior::PosteriorSummary;

/// Pixels per unit length of the image square.
const SCALE: f64 = 500.0;
const MARGIN: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvgMode {
    DataOnly,
    BandsOnly,
    Overlay,
}

impl std::str::FromStr for SvgMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "data" | "data_only" => Ok(SvgMode::DataOnly),
            "bands" | "bands_only" => Ok(SvgMode::BandsOnly),
            "overlay" => Ok(SvgMode::Overlay),
            other => Err(Error::invalid(format!("unknown plot mode '{other}'"))),
        }
    }
}

struct Frame {
    x0: f64,
    y1: f64,
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * SCALE, (self.y1 - y) * SCALE)
    }
}

fn curve_points(obs: &PolarObservation, theta: &[f64], radii: &[f64]) -> Vec<(f64, f64)> {
    let c = obs.center();
    theta
        .iter()
        .zip(radii)
        .map(|(w, r)| (c.x + r * w.cos(), c.y + r * w.sin()))
        .collect()
}

/// Renders the observation and, unless `mode` is data only, the posterior
/// mean curve (solid) and band edges (dashed).
pub fn render_svg_string(
    obs: &PolarObservation,
    summary: Option<&PosteriorSummary>,
    mode: SvgMode,
) -> Result<String> {
    let curves: Vec<(&str, Vec<(f64, f64)>)> = match (mode, summary) {
        (SvgMode::DataOnly, _) => Vec::new(),
        (_, None) => return Err(Error::invalid("this plot mode needs a fitted summary")),
        (_, Some(s)) => vec![
            ("lower", curve_points(obs, &s.theta, &s.lower)),
            ("upper", curve_points(obs, &s.theta, &s.upper)),
            ("estimate", curve_points(obs, &s.theta, &s.estimate)),
        ],
    };

    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 1.0f64, 1.0f64);
    for (_, pts) in &curves {
        for &(x, y) in pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    let (x0, y0, x1, y1) = (x0 - MARGIN, y0 - MARGIN, x1 + MARGIN, y1 + MARGIN);
    let frame = Frame { x0, y1 };
    let (width, height) = ((x1 - x0) * SCALE, (y1 - y0) * SCALE);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#,
        w = width,
        h = height
    );
    let _ = writeln!(
        out,
        "<style>.pixel{{stroke:none}} .estimate{{fill:none;stroke:#d62728;stroke-width:2}} \
         .lower,.upper{{fill:none;stroke:#1f77b4;stroke-width:1.5;stroke-dasharray:6 4}}</style>"
    );
    let (sq0, sq1) = (frame.map(0.0, 1.0), frame.map(1.0, 0.0));
    let _ = writeln!(
        out,
        r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#ffffff" stroke="#888888"/>"##,
        sq0.0,
        sq0.1,
        sq1.0 - sq0.0,
        sq1.1 - sq0.1
    );

    if mode != SvgMode::BandsOnly && !obs.is_empty() {
        let side = SCALE / (obs.len() as f64).sqrt().ceil();
        let y = obs.intensity();
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (i, (px, py)) in obs.rect_points().into_iter().enumerate() {
            let level = if hi > lo { (y[i] - lo) / (hi - lo) } else { 0.5 };
            let g = (255.0 * (1.0 - level)).round() as u8;
            let (sx, sy) = frame.map(px, py);
            let opacity = if obs.is_active(i) { "" } else { r#" opacity="0.3""# };
            let _ = writeln!(
                out,
                r##"<rect class="pixel" x="{:.3}" y="{:.3}" width="{side:.3}" height="{side:.3}" fill="#{g:02x}{g:02x}{g:02x}"{opacity}/>"##,
                sx - side / 2.0,
                sy - side / 2.0,
            );
        }
    }

    for (class, pts) in &curves {
        let mut d = String::new();
        for (k, &(x, y)) in pts.iter().enumerate() {
            let (sx, sy) = frame.map(x, y);
            let _ = write!(d, "{}{sx:.3} {sy:.3} ", if k == 0 { "M" } else { "L" });
        }
        d.push('Z');
        let _ = writeln!(out, r#"<path class="{class}" d="{d}"/>"#);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn render_svg(
    obs: &PolarObservation,
    summary: Option<&PosteriorSummary>,
    mode: SvgMode,
    path: &Path,
) -> Result<()> {
    std::fs::write(path, render_svg_string(obs, summary, mode)?)?;
    Ok(())
}
