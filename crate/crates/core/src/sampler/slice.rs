//! Univariate slice sampling with stepping out and shrinkage.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Contractions allowed before an update gives up and keeps the old point.
pub const MAX_SHRINK: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOutcome {
    pub x: f64,
    /// Log density at `x`.
    pub logf: f64,
    pub evaluations: usize,
    /// Shrinkage ran out of contractions and `x` is the starting point.
    pub failed: bool,
}

/// One slice update of `x0` under the unnormalised log density `logf`.
pub fn slice_univariate<F, R>(
    mut logf: F,
    x0: f64,
    width: f64,
    max_steps: usize,
    rng: &mut R,
) -> SliceOutcome
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let lf0 = logf(x0);
    let mut out = slice_step(logf, x0, lf0, width, max_steps, rng);
    out.evaluations += 1;
    out
}

/// Slice update when `logf(x0)` is already known.
pub fn slice_step<F, R>(
    mut logf: F,
    x0: f64,
    logf_x0: f64,
    width: f64,
    max_steps: usize,
    rng: &mut R,
) -> SliceOutcome
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    debug_assert!(logf_x0 > f64::NEG_INFINITY);
    let width = if width > 0.0 { width } else { f64::MIN_POSITIVE };
    let e: f64 = Exp1.sample(rng);
    let level = logf_x0 - e;
    let mut evaluations = 0usize;
    let mut eval = |x: f64, evaluations: &mut usize| {
        *evaluations += 1;
        logf(x)
    };

    let mut left = x0 - width * rng.random::<f64>();
    let mut right = left + width;
    let steps = max_steps.max(1);
    let mut to_left = (steps as f64 * rng.random::<f64>()) as usize;
    let mut to_right = steps - 1 - to_left.min(steps - 1);
    while to_left > 0 && eval(left, &mut evaluations) > level {
        left -= width;
        to_left -= 1;
    }
    while to_right > 0 && eval(right, &mut evaluations) > level {
        right += width;
        to_right -= 1;
    }

    for _ in 0..MAX_SHRINK {
        let x1 = left + rng.random::<f64>() * (right - left);
        let lf1 = eval(x1, &mut evaluations);
        if lf1 > level {
            return SliceOutcome {
                x: x1,
                logf: lf1,
                evaluations,
                failed: false,
            };
        }
        if x1 < x0 {
            left = x1;
        } else {
            right = x1;
        }
    }
    SliceOutcome {
        x: x0,
        logf: logf_x0,
        evaluations,
        failed: true,
    }
}
