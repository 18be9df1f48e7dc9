//! Gaussian random-walk Metropolis–Hastings for one coordinate.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhOutcome {
    pub x: f64,
    pub logf: f64,
    pub accepted: bool,
}

/// One random-walk update; returns the new point and whether it moved.
pub fn mh_univariate<F, R>(mut logf: F, x0: f64, proposal_sd: f64, rng: &mut R) -> (f64, bool)
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let lf0 = logf(x0);
    let out = mh_step(logf, x0, lf0, proposal_sd, rng);
    (out.x, out.accepted)
}

/// Random-walk update when `logf(x0)` is already known.
pub fn mh_step<F, R>(mut logf: F, x0: f64, logf_x0: f64, proposal_sd: f64, rng: &mut R) -> MhOutcome
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let step: f64 = StandardNormal.sample(rng);
    let proposal = x0 + proposal_sd * step;
    let lf1 = logf(proposal);
    let log_u = rng.random::<f64>().ln();
    if log_u < lf1 - logf_x0 {
        MhOutcome {
            x: proposal,
            logf: lf1,
            accepted: true,
        }
    } else {
        MhOutcome {
            x: x0,
            logf: logf_x0,
            accepted: false,
        }
    }
}
