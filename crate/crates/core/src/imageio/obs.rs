//! Plain-text observation and mask files.
//!
//! ```text
//! bayesbd-obs v1
//! generator simulate --family binary --m 100 ...
//! center 0.5 0.5
//! pixels 10000
//! columns r theta intensity
//! 0.6946 3.9273 0
//! ...
//! ```
//!
//! A fourth column `mask` (0/1) is present when some pixels are excluded.
//! Lines starting with `#` are ignored.

use std::path::Path;

use super::bits_to_lines;
use crate::error::{Error, Result};
use crate::geometry::ReferencePoint;
use crate::model::PolarObservation;

pub const OBS_HEADER: &str = "bayesbd-obs v1";
pub const MASK_HEADER: &str = "bayesbd-mask v1";

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationFile {
    /// Free-text record of how the data were produced.
    pub generator: String,
    pub obs: PolarObservation,
}

pub fn format_observation(obs: &PolarObservation, generator: &str) -> String {
    let mut out = String::with_capacity(obs.len() * 48 + 128);
    let c = obs.center();
    out.push_str(OBS_HEADER);
    out.push('\n');
    out.push_str(&format!("generator {}\n", generator.replace('\n', " ")));
    out.push_str(&format!("center {} {}\n", c.x, c.y));
    out.push_str(&format!("pixels {}\n", obs.len()));
    let mask = obs.mask();
    out.push_str(if mask.is_some() {
        "columns r theta intensity mask\n"
    } else {
        "columns r theta intensity\n"
    });
    for i in 0..obs.len() {
        out.push_str(&format!("{} {} {}", obs.r()[i], obs.theta()[i], obs.intensity()[i]));
        if let Some(m) = mask {
            out.push_str(if m[i] { " 1" } else { " 0" });
        }
        out.push('\n');
    }
    out
}

pub fn write_observation(path: &Path, obs: &PolarObservation, generator: &str) -> Result<()> {
    std::fs::write(path, format_observation(obs, generator))?;
    Ok(())
}

pub fn read_observation(path: &Path) -> Result<ObservationFile> {
    let text = std::fs::read_to_string(path)?;
    parse_observation(&text, &path.display().to_string())
}

pub(super) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    path: &'a str,
    line: usize,
}

impl<'a> Lines<'a> {
    pub(super) fn new(text: &'a str, path: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            path,
            line: 0,
        }
    }

    pub(super) fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_string(),
            line: self.line,
            message: message.into(),
        }
    }

    pub(super) fn next_line(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Some(t);
        }
        None
    }

    pub(super) fn expect(&mut self, what: &str) -> Result<&'a str> {
        self.next_line().ok_or_else(|| self.err(format!("unexpected end of file, expected {what}")))
    }

    /// Next line, which must start with `key`; returns the rest.
    pub(super) fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let l = self.expect(key)?;
        match l.split_once(char::is_whitespace) {
            Some((k, rest)) if k == key => Ok(rest.trim()),
            None if l == key => Ok(""),
            _ => Err(self.err(format!("expected '{key}', found '{l}'"))),
        }
    }

    pub(super) fn float(&self, s: &str) -> Result<f64> {
        s.parse::<f64>().map_err(|_| self.err(format!("bad number '{s}'")))
    }

    pub(super) fn floats(&self, s: &str) -> Result<Vec<f64>> {
        s.split_whitespace().map(|t| self.float(t)).collect()
    }

    pub(super) fn usize(&self, s: &str) -> Result<usize> {
        s.trim().parse::<usize>().map_err(|_| self.err(format!("bad count '{s}'")))
    }

    pub(super) fn keyed_float(&mut self, key: &str) -> Result<f64> {
        let v = self.keyed(key)?;
        self.float(v)
    }

    pub(super) fn keyed_floats(&mut self, key: &str) -> Result<Vec<f64>> {
        let v = self.keyed(key)?;
        self.floats(v)
    }

    pub(super) fn keyed_usize(&mut self, key: &str) -> Result<usize> {
        let v = self.keyed(key)?;
        self.usize(v)
    }

    pub(super) fn row(&mut self, what: &str) -> Result<Vec<f64>> {
        let v = self.expect(what)?;
        self.floats(v)
    }
}

pub fn parse_observation(text: &str, path: &str) -> Result<ObservationFile> {
    let mut lines = Lines::new(text, path);
    let header = lines.expect("header")?;
    if header != OBS_HEADER {
        return Err(lines.err(format!("expected header '{OBS_HEADER}'")));
    }
    let generator = lines.keyed("generator")?.to_string();
    let c = lines.keyed_floats("center")?;
    if c.len() != 2 {
        return Err(lines.err("center needs two numbers"));
    }
    let center = ReferencePoint::new(c[0], c[1]).map_err(|e| lines.err(e.to_string()))?;
    let n = lines.keyed_usize("pixels")?;
    let cols: Vec<&str> = lines.keyed("columns")?.split_whitespace().collect();
    let with_mask = match cols.as_slice() {
        ["r", "theta", "intensity"] => false,
        ["r", "theta", "intensity", "mask"] => true,
        _ => return Err(lines.err("columns must be 'r theta intensity [mask]'")),
    };
    let mut r = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut mask = Vec::with_capacity(if with_mask { n } else { 0 });
    for _ in 0..n {
        let row = lines.row("pixel row")?;
        if row.len() != cols.len() {
            return Err(lines.err(format!("expected {} values", cols.len())));
        }
        r.push(row[0]);
        theta.push(row[1]);
        y.push(row[2]);
        if with_mask {
            mask.push(row[3] != 0.0);
        }
    }
    if lines.next_line().is_some() {
        return Err(lines.err(format!("more than {n} pixel rows")));
    }
    let obs = PolarObservation::new(y, theta, r, center, with_mask.then_some(mask))
        .map_err(|e| lines.err(e.to_string()))?;
    Ok(ObservationFile { generator, obs })
}

/// Mask file: a header, the pixel count, then rows of `0`/`1` characters.
pub fn write_mask(path: &Path, mask: &[bool]) -> Result<()> {
    let mut out = format!("{MASK_HEADER}\npixels {}\n", mask.len());
    for l in bits_to_lines(mask) {
        out.push_str(&l);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_mask(path: &Path) -> Result<Vec<bool>> {
    let text = std::fs::read_to_string(path)?;
    parse_mask(&text, &path.display().to_string())
}

pub fn parse_mask(text: &str, path: &str) -> Result<Vec<bool>> {
    let mut lines = Lines::new(text, path);
    if lines.expect("header")? != MASK_HEADER {
        return Err(lines.err(format!("expected header '{MASK_HEADER}'")));
    }
    let n = lines.keyed_usize("pixels")?;
    let bits = read_bits(&mut lines, n)?;
    if lines.next_line().is_some() {
        return Err(lines.err("trailing content after mask bits"));
    }
    Ok(bits)
}

pub(super) fn read_bits(lines: &mut Lines<'_>, n: usize) -> Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(n);
    while bits.len() < n {
        for ch in lines.expect("membership bits")?.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => return Err(lines.err(format!("bad bit '{c}'"))),
            }
        }
    }
    if bits.len() != n {
        return Err(lines.err(format!("expected {n} bits, found {}", bits.len())));
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PolarObservation {
        let pts = [(0.1, 0.2), (0.7, 0.9), (0.5, 0.5), (0.3, 0.6)];
        PolarObservation::from_rect(&pts, vec![1.0, 0.0, 1.0, 0.25], ReferencePoint::image_center())
            .unwrap()
    }

    #[test]
    fn observation_round_trip() {
        let obs = sample();
        let text = format_observation(&obs, "test --seed 1");
        let back = parse_observation(&text, "mem").unwrap();
        assert_eq!(back.obs, obs);
        assert_eq!(back.generator, "test --seed 1");

        let masked = obs.with_mask(Some(vec![true, false, true, true])).unwrap();
        let back = parse_observation(&format_observation(&masked, ""), "mem").unwrap();
        assert_eq!(back.obs, masked);
    }

    #[test]
    fn observation_errors_carry_line_numbers() {
        let text = format_observation(&sample(), "g").replace(" 0.25\n", " zz\n");
        match parse_observation(&text, "f.obs") {
            Err(Error::Parse { line, .. }) => assert!(line > 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_observation("nope", "f").is_err());
        let truncated: String = format_observation(&sample(), "g").lines().take(6).collect::<Vec<_>>().join("\n");
        assert!(parse_observation(&truncated, "f").is_err());
    }

    #[test]
    fn mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        let mask: Vec<bool> = (0..257).map(|i| i % 3 == 0).collect();
        write_mask(&p, &mask).unwrap();
        assert_eq!(read_mask(&p).unwrap(), mask);
        assert!(parse_mask("bayesbd-mask v1\npixels 3\n01\n", "m").is_err());
    }
}
