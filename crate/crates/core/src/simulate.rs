//! Synthetic binary and Gaussian-noise images with a known boundary.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{inside, to_polar, RadialBoundary, ReferencePoint};
use crate::model::PolarObservation;

/// How pixel locations are placed in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    /// Cell centres of the m x m grid.
    Deterministic,
    /// Independent uniform points.
    Uniform,
    /// One uniform point inside each grid cell.
    Jittered,
}

impl DesignKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DesignKind::Deterministic => "D",
            DesignKind::Uniform => "U",
            DesignKind::Jittered => "J",
        }
    }
}

impl std::str::FromStr for DesignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "D" | "d" => Ok(DesignKind::Deterministic),
            "U" | "u" => Ok(DesignKind::Uniform),
            "J" | "j" => Ok(DesignKind::Jittered),
            other => Err(Error::invalid(format!("unknown design '{other}' (use D, U or J)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignSpec {
    pub kind: DesignKind,
    pub m: usize,
}

impl DesignSpec {
    pub fn new(kind: DesignKind, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!("m must be at least 2, got {m}")));
        }
        Ok(Self { kind, m })
    }
}

/// `m^2` locations in `[0,1]^2`, column by column (x outer, y inner).
pub fn sample_locations<R: Rng + ?Sized>(design: DesignSpec, rng: &mut R) -> Vec<(f64, f64)> {
    let m = design.m;
    let h = 1.0 / m as f64;
    let mut pts = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let p = match design.kind {
                DesignKind::Deterministic => ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h),
                DesignKind::Uniform => (rng.random::<f64>(), rng.random::<f64>()),
                DesignKind::Jittered => {
                    let u: f64 = rng.random();
                    let v: f64 = rng.random();
                    ((i as f64 + u) * h, (j as f64 + v) * h)
                }
            };
            pts.push(p);
        }
    }
    pts
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Binary image: success probability `pi_in` inside the boundary and
/// `pi_out` outside.
pub fn gen_binary<B, R>(
    design: DesignSpec,
    pi_in: f64,
    pi_out: f64,
    boundary: &B,
    center: ReferencePoint,
    rng: &mut R,
) -> Result<PolarObservation>
where
    B: RadialBoundary + ?Sized,
    R: Rng + ?Sized,
{
    check_prob("pi_in", pi_in)?;
    check_prob("pi_out", pi_out)?;
    let pts = sample_locations(design, rng);
    let y = pts
        .iter()
        .map(|&(x, y)| {
            let p = if inside(boundary, to_polar(x, y, center)) { pi_in } else { pi_out };
            (rng.random::<f64>() < p) as u8 as f64
        })
        .collect();
    PolarObservation::from_rect(&pts, y, center)
}

/// Region means and noise levels for [`gen_gaussian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianNoise {
    pub mu_in: f64,
    pub mu_out: f64,
    pub sd_in: f64,
    pub sd_out: f64,
}

/// Image with Gaussian noise around a region-wise constant mean.
pub fn gen_gaussian<B, R>(
    design: DesignSpec,
    noise: GaussianNoise,
    boundary: &B,
    center: ReferencePoint,
    rng: &mut R,
) -> Result<PolarObservation>
where
    B: RadialBoundary + ?Sized,
    R: Rng + ?Sized,
{
    for (name, sd) in [("sd_in", noise.sd_in), ("sd_out", noise.sd_out)] {
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(Error::invalid(format!("{name} must be positive, got {sd}")));
        }
    }
    if !noise.mu_in.is_finite() || !noise.mu_out.is_finite() {
        return Err(Error::invalid("region means must be finite"));
    }
    let pts = sample_locations(design, rng);
    let y = pts
        .iter()
        .map(|&(x, y)| {
            let e: f64 = StandardNormal.sample(rng);
            if inside(boundary, to_polar(x, y, center)) {
                noise.mu_in + noise.sd_in * e
            } else {
                noise.mu_out + noise.sd_out * e
            }
        })
        .collect();
    PolarObservation::from_rect(&pts, y, center)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Circle, Triangle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn deterministic_design_m2() {
        let d = DesignSpec::new(DesignKind::Deterministic, 2).unwrap();
        assert_eq!(
            sample_locations(d, &mut rng(0)),
            vec![(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]
        );
        assert!(DesignSpec::new(DesignKind::Uniform, 1).is_err());
    }

    #[test]
    fn jittered_design_one_point_per_cell() {
        let d = DesignSpec::new(DesignKind::Jittered, 2).unwrap();
        for seed in 0..50 {
            let pts = sample_locations(d, &mut rng(seed));
            let mut quadrants: Vec<(bool, bool)> = pts.iter().map(|p| (p.0 < 0.5, p.1 < 0.5)).collect();
            quadrants.sort();
            quadrants.dedup();
            assert_eq!(quadrants.len(), 4);
        }
    }

    #[test]
    fn uniform_design_chi_square() {
        let d = DesignSpec::new(DesignKind::Uniform, 100).unwrap();
        let pts = sample_locations(d, &mut rng(3));
        let mut counts = [0usize; 100];
        for (x, y) in pts {
            counts[(x * 10.0) as usize * 10 + (y * 10.0) as usize] += 1;
        }
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - 100.0).powi(2) / 100.0).sum();
        // 0.999 quantile of chi-square with 99 degrees of freedom
        assert!(chi2 < 148.23, "chi2 = {chi2}");
    }

    #[test]
    fn noiseless_binary_is_the_indicator() {
        let d = DesignSpec::new(DesignKind::Jittered, 30).unwrap();
        let c = ReferencePoint::image_center();
        let circle = Circle::new(0.3).unwrap();
        let obs = gen_binary(d, 1.0, 0.0, &circle, c, &mut rng(1)).unwrap();
        assert_eq!(obs.len(), 900);
        for i in 0..obs.len() {
            assert_eq!(obs.intensity()[i] == 1.0, inside(&circle, obs.point(i)));
        }
    }

    #[test]
    fn binary_inside_rate() {
        let d = DesignSpec::new(DesignKind::Jittered, 100).unwrap();
        let c = ReferencePoint::image_center();
        let circle = Circle::new(0.3).unwrap();
        let obs = gen_binary(d, 0.6, 0.4, &circle, c, &mut rng(2)).unwrap();
        let (mut n, mut ones) = (0.0f64, 0.0f64);
        for i in 0..obs.len() {
            if inside(&circle, obs.point(i)) {
                n += 1.0;
                ones += obs.intensity()[i];
            }
        }
        let sd = (0.6 * 0.4 / n).sqrt();
        assert!((ones / n - 0.6).abs() < 3.0 * sd);
    }

    #[test]
    fn gaussian_tiny_noise_and_seeding() {
        let d = DesignSpec::new(DesignKind::Deterministic, 20).unwrap();
        let c = ReferencePoint::image_center();
        let tri = Triangle::new(0.5).unwrap();
        let noise = GaussianNoise {
            mu_in: 1.0,
            mu_out: -1.0,
            sd_in: 1e-9,
            sd_out: 1e-9,
        };
        let obs = gen_gaussian(d, noise, &tri, c, &mut rng(4)).unwrap();
        for i in 0..obs.len() {
            let want = if inside(&tri, obs.point(i)) { 1.0 } else { -1.0 };
            assert!((obs.intensity()[i] - want).abs() < 1e-7);
        }
        let again = gen_gaussian(d, noise, &tri, c, &mut rng(4)).unwrap();
        assert_eq!(obs, again);
        let bad = GaussianNoise { sd_in: 0.0, ..noise };
        assert!(gen_gaussian(d, bad, &tri, c, &mut rng(4)).is_err());
    }
}
