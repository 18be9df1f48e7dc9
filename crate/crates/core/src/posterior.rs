//! Posterior mean boundary, uniform credible band and pixel membership.

use crate::error::{Error, Result};
use crate::geometry::{interpolate_periodic, RadialBoundary, SampledCurve};
use crate::model::PolarObservation;
use crate::sampler::{ChainDiagnostics, ChainOutput};

/// Floor on the pointwise sd before it is used as a divisor.
pub const SD_FLOOR: f64 = 1e-8;
/// Band radii are kept strictly positive.
const MIN_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub theta: Vec<f64>,
    pub estimate: Vec<f64>,
    /// Pointwise sample sd, before flooring.
    pub sd: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Band half-width in units of the (floored) pointwise sd.
    pub l0: f64,
    pub level: f64,
    pub nrun: usize,
    pub diagnostics: ChainDiagnostics,
}

impl PosteriorSummary {
    pub fn acceptance_rate(&self) -> f64 {
        self.diagnostics.acceptance_rate()
    }

    pub fn unique_fraction(&self) -> f64 {
        self.diagnostics.unique_fraction
    }

    pub fn curve(&self, edge: Edge) -> &[f64] {
        match edge {
            Edge::Outer => &self.upper,
            Edge::Mean => &self.estimate,
            Edge::Inner => &self.lower,
        }
    }

    /// The chosen curve as a boundary; `None` if any radius is not positive.
    pub fn boundary(&self, edge: Edge) -> Option<SampledCurve> {
        SampledCurve::new(self.curve(edge).to_vec()).ok()
    }

    /// Whether `curve` lies within the band at every grid angle.
    pub fn band_contains<B: RadialBoundary + ?Sized>(&self, curve: &B) -> bool {
        self.theta
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&w, (&lo, &hi))| {
                let r = curve.radius(w);
                lo <= r && r <= hi
            })
    }
}

/// Which curve decides pixel membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Edge {
    /// Upper band edge.
    #[default]
    Outer,
    Mean,
    /// Lower band edge.
    Inner,
}

impl Edge {
    pub fn as_str(&self) -> &'static str {
        match self {
            Edge::Outer => "outer",
            Edge::Mean => "mean",
            Edge::Inner => "inner",
        }
    }
}

impl std::str::FromStr for Edge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "outer" | "upper" => Ok(Edge::Outer),
            "mean" | "estimate" => Ok(Edge::Mean),
            "inner" | "lower" => Ok(Edge::Inner),
            other => Err(Error::invalid(format!("unknown edge '{other}'"))),
        }
    }
}

/// Type-7 sample quantile of `values` (which are sorted in place).
pub fn quantile_type7(values: &mut [f64], p: f64) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let h = (values.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(values.len() - 1);
    values[lo] + (h - lo as f64) * (values[hi] - values[lo])
}

/// Mean curve and uniform credible band at `level` from the kept sweeps.
pub fn summarize(chain: &ChainOutput, level: f64) -> Result<PosteriorSummary> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("level must lie in (0, 1), got {level}")));
    }
    let n = chain.boundaries.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let g = chain.theta.len();
    let mut estimate = vec![0.0; g];
    for row in &chain.boundaries {
        for (e, r) in estimate.iter_mut().zip(row) {
            *e += r;
        }
    }
    for e in &mut estimate {
        *e /= n as f64;
    }
    let mut sd = vec![0.0; g];
    for row in &chain.boundaries {
        for ((s, r), e) in sd.iter_mut().zip(row).zip(&estimate) {
            *s += (r - e) * (r - e);
        }
    }
    for s in &mut sd {
        *s = (*s / (n - 1) as f64).sqrt();
    }
    let floored: Vec<f64> = sd.iter().map(|s| s.max(SD_FLOOR)).collect();
    let mut u: Vec<f64> = chain
        .boundaries
        .iter()
        .map(|row| {
            row.iter()
                .zip(&estimate)
                .zip(&floored)
                .map(|((r, e), s)| (r - e).abs() / s)
                .fold(0.0, f64::max)
        })
        .collect();
    let l0 = quantile_type7(&mut u, level);
    let lower = estimate
        .iter()
        .zip(&floored)
        .map(|(e, s)| (e - l0 * s).max(MIN_RADIUS))
        .collect();
    let upper = estimate.iter().zip(&floored).map(|(e, s)| e + l0 * s).collect();
    Ok(PosteriorSummary {
        theta: chain.theta.clone(),
        estimate,
        sd,
        lower,
        upper,
        l0,
        level,
        nrun: n,
        diagnostics: chain.diagnostics.clone(),
    })
}

/// Per-pixel membership in the region bounded by the chosen curve, with the
/// curve interpolated linearly between grid angles.
pub fn membership_export(summary: &PosteriorSummary, obs: &PolarObservation, edge: Edge) -> Vec<bool> {
    let curve = summary.curve(edge);
    obs.theta()
        .iter()
        .zip(obs.r())
        .map(|(&w, &r)| r < interpolate_periodic(curve, w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{angle_grid, Circle, ReferencePoint};
    use crate::model::{Family, Nuisance, BinaryParams};
    use crate::sampler::ChainState;

    fn chain(theta: Vec<f64>, rows: Vec<Vec<f64>>) -> ChainOutput {
        ChainOutput {
            family: Family::Binary,
            mu: 0.3,
            theta,
            boundaries: rows,
            traces: None,
            diagnostics: ChainDiagnostics::default(),
            final_state: ChainState {
                z: vec![0.0; 3],
                a: 1.0,
                tau: 1.0,
                nuisance: Nuisance::Binary(BinaryParams { pi1: 0.5, pi2: 0.5 }),
            },
        }
    }

    #[test]
    fn degenerate_chain_collapses_band() {
        let theta = angle_grid(200);
        let row: Vec<f64> = theta.iter().map(|t| 0.3 + 0.01 * t.cos()).collect();
        let s = summarize(&chain(theta, vec![row.clone(); 5]), 0.95).unwrap();
        assert_eq!(s.l0, 0.0);
        assert_eq!(s.estimate, row);
        assert_eq!(s.lower, row);
        assert_eq!(s.upper, row);
    }

    #[test]
    fn hand_worked_toy_chain() {
        // Angle 0: 1, 2, 3 -> mean 2, sd 1. Angle 1: 2, 2, 5 -> mean 3, sd sqrt(3).
        let rows = vec![vec![1.0, 2.0], vec![2.0, 2.0], vec![3.0, 5.0]];
        let s = summarize(&chain(vec![0.0, 3.0], rows), 0.5).unwrap();
        assert_eq!(s.estimate, vec![2.0, 3.0]);
        let r3 = 3f64.sqrt();
        assert!((s.sd[1] - r3).abs() < 1e-15);
        // u = [max(1, 1/r3), max(0, 1/r3), max(1, 2/r3)] = [1, 1/r3, 2/r3]
        // sorted [0.577, 1, 1.155], median (type 7, p = 0.5) = 1
        assert!((s.l0 - 1.0).abs() < 1e-15);
        assert_eq!(s.lower[0], 1.0);
        assert!((s.upper[1] - (3.0 + r3)).abs() < 1e-15);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            summarize(&chain(vec![0.0], vec![vec![1.0]]), 0.95),
            Err(Error::TooFewSamples(1))
        ));
        assert!(summarize(&chain(vec![0.0], vec![vec![1.0], vec![2.0]]), 1.0).is_err());
    }

    #[test]
    fn quantile_rule() {
        let mut v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile_type7(&mut v, 0.0), 1.0);
        assert_eq!(quantile_type7(&mut v, 1.0), 4.0);
        assert!((quantile_type7(&mut v, 0.95) - 3.85).abs() < 1e-12);
    }

    fn constant_summary(r: f64) -> PosteriorSummary {
        let theta = angle_grid(200);
        let rows = vec![vec![r; 200], vec![r; 200]];
        summarize(&chain(theta, rows), 0.95).unwrap()
    }

    #[test]
    fn membership_trivial_cases() {
        let s = constant_summary(0.3);
        let c = ReferencePoint::image_center();
        let obs = PolarObservation::from_rect(&[(0.5, 0.5), (0.81, 0.5), (0.5, 0.19)], vec![0.0; 3], c)
            .unwrap();
        for edge in [Edge::Outer, Edge::Mean, Edge::Inner] {
            assert_eq!(membership_export(&s, &obs, edge), vec![true, false, false]);
        }
        assert!(s.band_contains(&Circle::new(0.3).unwrap()));
        assert!(!s.band_contains(&Circle::new(0.31).unwrap()));
    }

    #[test]
    fn edges_are_nested() {
        let theta = angle_grid(200);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| theta.iter().map(|t| 0.3 + 0.002 * i as f64 * (2.0 * t).sin()).collect())
            .collect();
        let s = summarize(&chain(theta, rows), 0.95).unwrap();
        for i in 0..200 {
            assert!(s.lower[i] <= s.estimate[i] && s.estimate[i] <= s.upper[i]);
            assert!(s.lower[i] > 0.0);
        }
    }
}
