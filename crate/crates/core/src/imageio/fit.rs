//! Fit result files.
//!
//! ```text
//! bayesbd-fit v1
//! family binary            <- free key/value lines: config echo, diagnostics
//! seed 42
//! ...
//! center 0.5 0.5
//! level 0.95
//! L0 2.87
//! grid 200
//! theta 0 0.0314 ...
//! estimate ...
//! lower ...
//! upper ...
//! membership 10000
//! 0000011110...            <- 100 pixels per line, same order as the input
//! traces 4000 2 21         <- only with --output-all: rows, nuisance and z widths
//! 1.02 498.1 0.51 0.19 ... <- a tau nuisance... z...
//! end
//! ```

use std::path::Path;

use super::obs::{read_bits, Lines};
use super::{bits_to_lines, join_floats};
use crate::error::{Error, Result};
use crate::geometry::ReferencePoint;
use crate::posterior::PosteriorSummary;
use crate::sampler::Traces;

pub const FIT_HEADER: &str = "bayesbd-fit v1";
const RESERVED: [&str; 11] = [
    "center", "level", "L0", "grid", "theta", "estimate", "lower", "upper", "membership", "traces",
    "end",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FitRecord {
    /// Ordered key/value pairs; keys are single tokens.
    pub meta: Vec<(String, String)>,
    pub center: ReferencePoint,
    pub level: f64,
    pub l0: f64,
    pub theta: Vec<f64>,
    pub estimate: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub membership: Vec<bool>,
    pub traces: Option<Traces>,
}

impl FitRecord {
    pub fn new(summary: &PosteriorSummary, membership: Vec<bool>, center: ReferencePoint) -> Self {
        Self {
            meta: Vec::new(),
            center,
            level: summary.level,
            l0: summary.l0,
            theta: summary.theta.clone(),
            estimate: summary.estimate.clone(),
            lower: summary.lower.clone(),
            upper: summary.upper.clone(),
            membership,
            traces: None,
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(FIT_HEADER.to_string());
        for (k, v) in &self.meta {
            if k.is_empty() || k.contains(char::is_whitespace) || RESERVED.contains(&k.as_str()) {
                return Err(Error::invalid(format!("bad metadata key '{k}'")));
            }
            line(format!("{k} {}", v.replace('\n', " ")).trim_end().to_string());
        }
        line(format!("center {} {}", self.center.x, self.center.y));
        line(format!("level {}", self.level));
        line(format!("L0 {}", self.l0));
        line(format!("grid {}", self.theta.len()));
        for (name, values) in [
            ("theta", &self.theta),
            ("estimate", &self.estimate),
            ("lower", &self.lower),
            ("upper", &self.upper),
        ] {
            if values.len() != self.theta.len() {
                return Err(Error::LengthMismatch(format!("{name} has {} values", values.len())));
            }
            line(format!("{name} {}", join_floats(values)));
        }
        line(format!("membership {}", self.membership.len()));
        for l in bits_to_lines(&self.membership) {
            line(l);
        }
        if let Some(t) = &self.traces {
            let nu = t.nuisance.first().map_or(0, Vec::len);
            let nz = t.z.first().map_or(0, Vec::len);
            line(format!("traces {} {nu} {nz}", t.a.len()));
            for i in 0..t.a.len() {
                let mut row = vec![t.a[i], t.tau[i]];
                row.extend(&t.nuisance[i]);
                row.extend(&t.z[i]);
                line(join_floats(&row));
            }
        }
        line("end".to_string());
        Ok(out)
    }
}

pub fn write_fit(path: &Path, record: &FitRecord) -> Result<()> {
    std::fs::write(path, record.to_text()?)?;
    Ok(())
}

pub fn read_fit(path: &Path) -> Result<FitRecord> {
    let text = std::fs::read_to_string(path)?;
    parse_fit(&text, &path.display().to_string())
}

pub fn parse_fit(text: &str, path: &str) -> Result<FitRecord> {
    let mut lines = Lines::new(text, path);
    if lines.expect("header")? != FIT_HEADER {
        return Err(lines.err(format!("expected header '{FIT_HEADER}'")));
    }
    let mut meta = Vec::new();
    let center = loop {
        let l = lines.expect("center")?;
        let (k, v) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        if k == "center" {
            let c = lines.floats(v)?;
            if c.len() != 2 {
                return Err(lines.err("center needs two numbers"));
            }
            break ReferencePoint::new(c[0], c[1]).map_err(|e| lines.err(e.to_string()))?;
        }
        meta.push((k.to_string(), v.trim().to_string()));
    };
    let level = lines.keyed_float("level")?;
    let l0 = lines.keyed_float("L0")?;
    let grid = lines.keyed_usize("grid")?;
    let mut arrays = Vec::with_capacity(4);
    for name in ["theta", "estimate", "lower", "upper"] {
        let v = lines.keyed_floats(name)?;
        if v.len() != grid {
            return Err(lines.err(format!("{name} has {} values, expected {grid}", v.len())));
        }
        arrays.push(v);
    }
    let n = lines.keyed_usize("membership")?;
    let membership = read_bits(&mut lines, n)?;

    let mut traces = None;
    let mut l = lines.expect("end")?;
    if let Some(rest) = l.strip_prefix("traces") {
        let dims: Vec<usize> = rest
            .split_whitespace()
            .map(|s| lines.usize(s))
            .collect::<Result<_>>()?;
        let [rows, nu, nz] = dims[..] else {
            return Err(lines.err("traces needs rows, nuisance width and z width"));
        };
        let mut t = Traces::default();
        for _ in 0..rows {
            let row = lines.row("trace row")?;
            if row.len() != 2 + nu + nz {
                return Err(lines.err(format!("trace row needs {} values", 2 + nu + nz)));
            }
            t.a.push(row[0]);
            t.tau.push(row[1]);
            t.nuisance.push(row[2..2 + nu].to_vec());
            t.z.push(row[2 + nu..].to_vec());
        }
        traces = Some(t);
        l = lines.expect("end")?;
    }
    if l != "end" {
        return Err(lines.err(format!("expected 'end', found '{l}'")));
    }
    let mut arrays = arrays.into_iter();
    let mut next = || arrays.next().unwrap_or_default();
    Ok(FitRecord {
        meta,
        center,
        level,
        l0,
        theta: next(),
        estimate: next(),
        lower: next(),
        upper: next(),
        membership,
        traces,
    })
}
