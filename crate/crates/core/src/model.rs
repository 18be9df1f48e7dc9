//! Observations in polar form, region sufficient statistics and the log
//! conditional posterior of the boundary coefficients.

use crate::error::{Error, Result};
use crate::geometry::{angle_grid, to_polar, PolarPoint, RadialBoundary, ReferencePoint};
use crate::kernel::{BoundaryCoefficients, EigenSpectrum};

/// Number of angles used to check that a boundary stays positive and to
/// report posterior curves.
pub const GRID_SIZE: usize = 200;

/// Pixel intensities with polar coordinates about a reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarObservation {
    intensity: Vec<f64>,
    theta: Vec<f64>,
    r: Vec<f64>,
    center: ReferencePoint,
    mask: Option<Vec<bool>>,
}

impl PolarObservation {
    pub fn new(
        intensity: Vec<f64>,
        theta: Vec<f64>,
        r: Vec<f64>,
        center: ReferencePoint,
        mask: Option<Vec<bool>>,
    ) -> Result<Self> {
        let n = intensity.len();
        if theta.len() != n || r.len() != n {
            return Err(Error::LengthMismatch(format!(
                "{n} intensities, {} angles, {} radii",
                theta.len(),
                r.len()
            )));
        }
        if let Some(m) = &mask {
            if m.len() != n {
                return Err(Error::LengthMismatch(format!("{n} pixels but mask of {}", m.len())));
            }
        }
        if let Some(i) = r.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid(format!("pixel {i} has invalid radius {}", r[i])));
        }
        if let Some(i) = intensity.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("pixel {i} has non-finite intensity")));
        }
        let obs = Self {
            intensity,
            theta,
            r,
            center,
            mask,
        };
        if obs.active_count() == 0 {
            return Err(Error::EmptyObservation);
        }
        Ok(obs)
    }

    /// Builds an observation from rectangular pixel locations.
    pub fn from_rect(
        points: &[(f64, f64)],
        intensity: Vec<f64>,
        center: ReferencePoint,
    ) -> Result<Self> {
        let (r, theta) = points
            .iter()
            .map(|&(x, y)| {
                let p = to_polar(x, y, center);
                (p.r, p.theta)
            })
            .unzip();
        Self::new(intensity, theta, r, center, None)
    }

    pub fn len(&self) -> usize {
        self.intensity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensity.is_empty()
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn center(&self) -> ReferencePoint {
        self.center
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn point(&self, i: usize) -> PolarPoint {
        PolarPoint {
            r: self.r[i],
            theta: self.theta[i],
        }
    }

    #[inline]
    pub fn is_active(&self, i: usize) -> bool {
        self.mask.as_ref().is_none_or(|m| m[i])
    }

    pub fn active_count(&self) -> usize {
        match &self.mask {
            None => self.len(),
            Some(m) => m.iter().filter(|b| **b).count(),
        }
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.is_active(i))
    }

    /// Replaces the mask (`None` keeps every pixel).
    pub fn with_mask(self, mask: Option<Vec<bool>>) -> Result<Self> {
        Self::new(self.intensity, self.theta, self.r, self.center, mask)
    }

    /// Keeps only the unmasked pixels and drops the mask.
    pub fn filtered(&self) -> Result<Self> {
        let idx: Vec<usize> = self.active_indices().collect();
        Self::new(
            idx.iter().map(|&i| self.intensity[i]).collect(),
            idx.iter().map(|&i| self.theta[i]).collect(),
            idx.iter().map(|&i| self.r[i]).collect(),
            self.center,
            None,
        )
    }

    /// Rectangular pixel locations.
    pub fn rect_points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|i| self.center.to_rect(self.point(i))).collect()
    }

    /// Same pixels expressed about a different reference point.
    pub fn recenter(&self, center: ReferencePoint) -> Self {
        if center == self.center {
            return self.clone();
        }
        let (r, theta) = self
            .rect_points()
            .into_iter()
            .map(|(x, y)| {
                let p = to_polar(x, y, center);
                (p.r, p.theta)
            })
            .unzip();
        Self {
            intensity: self.intensity.clone(),
            theta,
            r,
            center,
            mask: self.mask.clone(),
        }
    }

    /// Errors on the first unmasked pixel whose intensity is not 0 or 1.
    pub fn check_binary(&self) -> Result<()> {
        match self
            .active_indices()
            .find(|&i| self.intensity[i] != 0.0 && self.intensity[i] != 1.0)
        {
            Some(index) => Err(Error::NonBinaryIntensity {
                index,
                value: self.intensity[index],
            }),
            None => Ok(()),
        }
    }

    pub fn mean_intensity(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for i in self.active_indices() {
            sum += self.intensity[i];
            n += 1;
        }
        sum / n as f64
    }

    pub fn max_radius(&self) -> f64 {
        self.active_indices().map(|i| self.r[i]).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Binary,
    Gaussian,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Binary => "binary",
            Family::Gaussian => "gaussian",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binary" => Ok(Family::Binary),
            "gaussian" | "continuous" => Ok(Family::Gaussian),
            other => Err(Error::invalid(format!("unknown family `{other}`"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Success probabilities inside (`pi1`) and outside (`pi2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryParams {
    pub pi1: f64,
    pub pi2: f64,
}

/// Mean and standard deviation inside (`1`) and outside (`2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub mu1: f64,
    pub sigma1: f64,
    pub mu2: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nuisance {
    Binary(BinaryParams),
    Gaussian(GaussianParams),
}

impl Nuisance {
    pub fn as_vec(&self) -> Vec<f64> {
        match *self {
            Nuisance::Binary(p) => vec![p.pi1, p.pi2],
            Nuisance::Gaussian(p) => vec![p.mu1, p.sigma1, p.mu2, p.sigma2],
        }
    }
}

/// Counts inside (`n1`, of which `ones1` are 1) and outside (`n2`, `ones2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinaryStats {
    pub n1: usize,
    pub ones1: usize,
    pub n2: usize,
    pub ones2: usize,
}

/// Region-wise counts, sums and sums of squares.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaussianStats {
    pub n1: usize,
    pub sum1: f64,
    pub sumsq1: f64,
    pub n2: usize,
    pub sum2: f64,
    pub sumsq2: f64,
}

/// Probabilities used to start a chain are kept away from 0 and 1 so that
/// the log-odds stay finite.
const PROB_CLAMP: f64 = 1e-3;

impl BinaryStats {
    pub fn mle(&self) -> BinaryParams {
        let rate = |ones: usize, n: usize| {
            if n == 0 {
                0.5
            } else {
                (ones as f64 / n as f64).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
            }
        };
        BinaryParams {
            pi1: rate(self.ones1, self.n1),
            pi2: rate(self.ones2, self.n2),
        }
    }
}

fn mean_sd(n: usize, sum: f64, sumsq: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let mean = sum / n as f64;
    let var = (sumsq / n as f64 - mean * mean).max(0.0);
    (mean, var.sqrt().max(1e-6))
}

impl GaussianStats {
    pub fn mle(&self) -> GaussianParams {
        let (mu1, sigma1) = mean_sd(self.n1, self.sum1, self.sumsq1);
        let (mu2, sigma2) = mean_sd(self.n2, self.sum2, self.sumsq2);
        GaussianParams {
            mu1,
            sigma1,
            mu2,
            sigma2,
        }
    }
}

pub fn partition_stats_binary<B: RadialBoundary + ?Sized>(
    obs: &PolarObservation,
    boundary: &B,
) -> Result<BinaryStats> {
    obs.check_binary()?;
    let mut s = BinaryStats::default();
    for i in obs.active_indices() {
        let one = (obs.intensity[i] == 1.0) as usize;
        if obs.r[i] < boundary.radius(obs.theta[i]) {
            s.n1 += 1;
            s.ones1 += one;
        } else {
            s.n2 += 1;
            s.ones2 += one;
        }
    }
    Ok(s)
}

pub fn partition_stats_gaussian<B: RadialBoundary + ?Sized>(
    obs: &PolarObservation,
    boundary: &B,
) -> GaussianStats {
    let mut s = GaussianStats::default();
    for i in obs.active_indices() {
        let y = obs.intensity[i];
        if obs.r[i] < boundary.radius(obs.theta[i]) {
            s.n1 += 1;
            s.sum1 += y;
            s.sumsq1 += y * y;
        } else {
            s.n2 += 1;
            s.sum2 += y;
            s.sumsq2 += y * y;
        }
    }
    s
}

/// Data part of the binary log conditional: everything that depends on the
/// boundary through the region counts.
#[inline]
pub fn binary_loglik(stats: &BinaryStats, p: BinaryParams) -> f64 {
    let l1 = p.pi1.ln();
    let l2 = p.pi2.ln();
    let m1 = (-p.pi1).ln_1p();
    let m2 = (-p.pi2).ln_1p();
    let log_odds = (l1 + m2) - (l2 + m1);
    let log_fail = m1 - m2;
    stats.ones1 as f64 * log_odds + stats.n1 as f64 * log_fail
}

/// Data part of the Gaussian log conditional.
#[inline]
pub fn gaussian_loglik(stats: &GaussianStats, p: GaussianParams) -> f64 {
    let sse = |n: usize, sum: f64, sumsq: f64, mu: f64| sumsq - 2.0 * mu * sum + n as f64 * mu * mu;
    let n1 = stats.n1 as f64;
    -n1 * (p.sigma1.ln() - p.sigma2.ln())
        - sse(stats.n1, stats.sum1, stats.sumsq1, p.mu1) / (2.0 * p.sigma1 * p.sigma1)
        - sse(stats.n2, stats.sum2, stats.sumsq2, p.mu2) / (2.0 * p.sigma2 * p.sigma2)
}

/// `-(tau / 2) z^T diag(v)^{-1} z`.
#[inline]
pub fn log_prior_z(z: &[f64], spectrum: &EigenSpectrum, tau: f64) -> f64 {
    -0.5 * tau * spectrum.quadratic_form(z)
}

/// True when the curve is strictly positive on the reporting grid.
pub fn boundary_is_valid(c: &BoundaryCoefficients) -> bool {
    angle_grid(GRID_SIZE).into_iter().all(|w| c.eval(w) > 0.0)
}

/// Log conditional posterior of `z` for binary images, up to a constant.
/// Returns `-inf` if the boundary is not positive on the check grid.
pub fn log_cond_z_binary(
    stats: &BinaryStats,
    params: BinaryParams,
    c: &BoundaryCoefficients,
    spectrum: &EigenSpectrum,
    tau: f64,
) -> f64 {
    if !boundary_is_valid(c) {
        return f64::NEG_INFINITY;
    }
    binary_loglik(stats, params) + log_prior_z(&c.z, spectrum, tau)
}

/// Log conditional posterior of `z` for Gaussian images, up to a constant.
pub fn log_cond_z_gaussian(
    stats: &GaussianStats,
    params: GaussianParams,
    c: &BoundaryCoefficients,
    spectrum: &EigenSpectrum,
    tau: f64,
) -> f64 {
    if !boundary_is_valid(c) {
        return f64::NEG_INFINITY;
    }
    gaussian_loglik(stats, params) + log_prior_z(&c.z, spectrum, tau)
}

/// Starting values found by profile likelihood over circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleInit {
    pub radius: f64,
    pub nuisance: Nuisance,
    /// The image carried no boundary information; `radius` is a fallback.
    pub degenerate: bool,
}

const MLE_GRID: usize = 50;
const MLE_MIN_RADIUS: f64 = 0.05;

/// Circle radius maximising the profile likelihood over a 50-point grid,
/// together with the nuisance MLEs at that radius.
pub fn mle_init(obs: &PolarObservation, family: Family) -> Result<MleInit> {
    if family == Family::Binary {
        obs.check_binary()?;
    }
    let mut pixels: Vec<(f64, f64)> = obs
        .active_indices()
        .map(|i| (obs.r[i], obs.intensity[i]))
        .collect();
    pixels.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = pixels.len();
    let mut prefix = Vec::with_capacity(n + 1);
    let (mut s, mut ss) = (0.0, 0.0);
    prefix.push((0.0, 0.0));
    for &(_, y) in &pixels {
        s += y;
        ss += y * y;
        prefix.push((s, ss));
    }
    let (total, total_sq) = prefix[n];

    let hi = (0.95 * obs.max_radius()).max(MLE_MIN_RADIUS * 1.01);
    let radii: Vec<f64> = (0..MLE_GRID)
        .map(|k| MLE_MIN_RADIUS + (hi - MLE_MIN_RADIUS) * k as f64 / (MLE_GRID - 1) as f64)
        .collect();

    let first = pixels[0].1;
    let constant = pixels.iter().all(|p| p.1 == first);

    let stats_at = |rho: f64| {
        let n1 = pixels.partition_point(|p| p.0 < rho);
        let (s1, ss1) = prefix[n1];
        (n1, s1, ss1, n - n1, total - s1, total_sq - ss1)
    };

    let total_var = (total_sq / n as f64 - (total / n as f64).powi(2)).max(0.0);
    let var_floor = 1e-12 * total_var.max(f64::MIN_POSITIVE);

    let profile = |rho: f64| -> Option<f64> {
        let (n1, s1, ss1, n2, s2, ss2) = stats_at(rho);
        match family {
            Family::Binary => {
                if n1 == 0 || n2 == 0 {
                    return None;
                }
                let part = |ones: f64, n: usize| {
                    let n = n as f64;
                    let p = ones / n;
                    let mut v = 0.0;
                    if ones > 0.0 {
                        v += ones * p.ln();
                    }
                    if n - ones > 0.0 {
                        v += (n - ones) * (1.0 - p).ln();
                    }
                    v
                };
                Some(part(s1, n1) + part(s2, n2))
            }
            Family::Gaussian => {
                if n1 < 2 || n2 < 2 {
                    return None;
                }
                let var = |n: usize, s: f64, ss: f64| {
                    let m = s / n as f64;
                    (ss / n as f64 - m * m).max(var_floor)
                };
                Some(
                    -0.5 * n1 as f64 * var(n1, s1, ss1).ln()
                        - 0.5 * n2 as f64 * var(n2, s2, ss2).ln(),
                )
            }
        }
    };

    let best = if constant {
        None
    } else {
        radii
            .iter()
            .filter_map(|&rho| profile(rho).map(|v| (rho, v)))
            .fold(None, |acc: Option<(f64, f64)>, (rho, v)| match acc {
                Some((_, bv)) if bv >= v => acc,
                _ => Some((rho, v)),
            })
    };

    let (radius, degenerate) = match best {
        Some((rho, _)) => (rho, false),
        None => (radii[MLE_GRID / 2], true),
    };
    let (n1, s1, ss1, n2, s2, ss2) = stats_at(radius);
    let nuisance = match family {
        Family::Binary => Nuisance::Binary(
            BinaryStats {
                n1,
                ones1: s1 as usize,
                n2,
                ones2: s2 as usize,
            }
            .mle(),
        ),
        Family::Gaussian => Nuisance::Gaussian(
            GaussianStats {
                n1,
                sum1: s1,
                sumsq1: ss1,
                n2,
                sum2: s2,
                sumsq2: ss2,
            }
            .mle(),
        ),
    };
    Ok(MleInit {
        radius,
        nuisance,
        degenerate,
    })
}
