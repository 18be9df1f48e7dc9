//! Conjugate and slice updates for the non-boundary parameters.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Normal};

use super::slice::{slice_step, SliceOutcome};
use super::{Hyperparameters, Ordering};
use crate::kernel::{eigenvalues, EigenSpectrum};
use crate::model::{BinaryParams, BinaryStats, GaussianParams, GaussianStats};

/// Slice width and stepping-out budget for the kernel scale `a`.
pub const A_SLICE_WIDTH: f64 = 1.0;
pub const A_SLICE_STEPS: usize = 50;

/// Success probabilities are kept strictly inside (0, 1).
const PROB_EPS: f64 = 1e-12;
/// Precision draws are clamped so that standard deviations stay finite.
const PRECISION_RANGE: (f64, f64) = (1e-12, 1e12);

fn gamma_rate<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0 / rate)
        .expect("gamma parameters are positive")
        .sample(rng)
}

/// `tau | z, a ~ Gamma(alpha_tau + L/2, rate = beta_tau + z^T diag(v)^{-1} z / 2)`.
pub fn sample_tau<R: Rng + ?Sized>(
    z: &[f64],
    spectrum: &EigenSpectrum,
    hyper: &Hyperparameters,
    rng: &mut R,
) -> f64 {
    let shape = hyper.alpha_tau + 0.5 * z.len() as f64;
    let rate = hyper.beta_tau + 0.5 * spectrum.quadratic_form(z);
    gamma_rate(shape, rate, rng).max(f64::MIN_POSITIVE)
}

fn violates(ordering: Ordering, inside: f64, outside: f64) -> bool {
    match ordering {
        Ordering::InsideHigher => inside < outside,
        Ordering::OutsideHigher => inside > outside,
        Ordering::None => false,
    }
}

/// Draw of `(pi1, pi2)` from ordered independent Betas.
///
/// The second value is true when a posterior Beta parameter was zero and the
/// half-count correction had to be applied.
pub fn sample_nuisance_binary<R: Rng + ?Sized>(
    stats: &BinaryStats,
    hyper: &Hyperparameters,
    ordering: Ordering,
    rng: &mut R,
) -> (BinaryParams, bool) {
    let mut corrected = false;
    let mut draw = |ones: usize, n: usize, rng: &mut R| {
        let mut a = hyper.alpha1 + ones as f64;
        let mut b = hyper.beta1 + (n - ones) as f64;
        if a <= 0.0 || b <= 0.0 {
            a += 0.5;
            b += 0.5;
            corrected = true;
        }
        let p: f64 = Beta::new(a, b).expect("beta parameters are positive").sample(rng);
        p.clamp(PROB_EPS, 1.0 - PROB_EPS)
    };
    let mut pi1 = draw(stats.ones1, stats.n1, rng);
    let mut pi2 = draw(stats.ones2, stats.n2, rng);
    if violates(ordering, pi1, pi2) {
        std::mem::swap(&mut pi1, &mut pi2);
    }
    (BinaryParams { pi1, pi2 }, corrected)
}

/// Normal–inverse-gamma draw of one region's `(mu, sigma)`.
fn draw_region<R: Rng + ?Sized>(
    n: usize,
    sum: f64,
    sumsq: f64,
    hyper: &Hyperparameters,
    rng: &mut R,
) -> (f64, f64) {
    let mu0 = hyper.mu0.unwrap_or(0.0);
    let kappa0 = 1.0 / (hyper.sigma0 * hyper.sigma0);
    let nf = n as f64;
    let (mean, ss) = if n == 0 {
        (0.0, 0.0)
    } else {
        let m = sum / nf;
        (m, (sumsq - nf * m * m).max(0.0))
    };
    let shape = hyper.alpha2 + 0.5 * nf;
    let rate =
        hyper.beta2 + 0.5 * ss + 0.5 * (kappa0 * nf / (nf + kappa0)) * (mean - mu0).powi(2);
    let precision = gamma_rate(shape, rate, rng).clamp(PRECISION_RANGE.0, PRECISION_RANGE.1);
    let sigma = precision.sqrt().recip();
    let post_mean = (kappa0 * mu0 + nf * mean) / (nf + kappa0);
    let post_sd = sigma / (nf + kappa0).sqrt();
    let mu = Normal::new(post_mean, post_sd)
        .expect("normal sd is positive and finite")
        .sample(rng);
    (mu, sigma)
}

/// Draw of `(mu1, sigma1, mu2, sigma2)`.
///
/// With mean ordering the two `(mu, sigma)` pairs are swapped as units when
/// the means are out of order. The sd ordering then sorts the sigmas alone,
/// or swaps the pairs if no mean ordering is set. The flag reports an empty
/// region, in which case that region was drawn from its prior. `hyper.mu0`
/// must already hold the prior mean; `None` is read as zero.
pub fn sample_nuisance_gaussian<R: Rng + ?Sized>(
    stats: &GaussianStats,
    hyper: &Hyperparameters,
    ordering_mean: Ordering,
    ordering_sd: Ordering,
    rng: &mut R,
) -> (GaussianParams, bool) {
    let (mut mu1, mut sigma1) = draw_region(stats.n1, stats.sum1, stats.sumsq1, hyper, rng);
    let (mut mu2, mut sigma2) = draw_region(stats.n2, stats.sum2, stats.sumsq2, hyper, rng);
    if violates(ordering_mean, mu1, mu2) {
        std::mem::swap(&mut mu1, &mut mu2);
        std::mem::swap(&mut sigma1, &mut sigma2);
    }
    if violates(ordering_sd, sigma1, sigma2) {
        if ordering_mean == Ordering::None {
            std::mem::swap(&mut mu1, &mut mu2);
        }
        std::mem::swap(&mut sigma1, &mut sigma2);
    }
    (
        GaussianParams {
            mu1,
            sigma1,
            mu2,
            sigma2,
        },
        stats.n1 == 0 || stats.n2 == 0,
    )
}

/// Log conditional density of the kernel scale `a` given `z` and `tau`,
/// with its Gamma(alpha_a, beta_a) prior. `-inf` outside `a > 0`.
pub fn log_density_a(a: f64, z: &[f64], tau: f64, hyper: &Hyperparameters) -> f64 {
    if !(a > 0.0) || !a.is_finite() {
        return f64::NEG_INFINITY;
    }
    let Ok(spec) = eigenvalues(a, z.len() / 2) else {
        return f64::NEG_INFINITY;
    };
    if !spec.is_positive() {
        return f64::NEG_INFINITY;
    }
    let log_det: f64 = spec.values().iter().map(|v| v.ln()).sum();
    -0.5 * log_det - 0.5 * tau * spec.quadratic_form(z) + (hyper.alpha_a - 1.0) * a.ln()
        - hyper.beta_a * a
}

/// One slice update of `a`.
pub fn sample_a<R: Rng + ?Sized>(
    z: &[f64],
    tau: f64,
    hyper: &Hyperparameters,
    rng: &mut R,
    current_a: f64,
) -> SliceOutcome {
    let logf = |a: f64| log_density_a(a, z, tau, hyper);
    let lf0 = logf(current_a);
    if lf0 == f64::NEG_INFINITY || lf0.is_nan() {
        return SliceOutcome {
            x: current_a,
            logf: lf0,
            evaluations: 1,
            failed: true,
        };
    }
    let mut out = slice_step(logf, current_a, lf0, A_SLICE_WIDTH, A_SLICE_STEPS, rng);
    out.evaluations += 1;
    out
}
