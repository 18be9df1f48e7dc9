//! Univariate MCMC kernels and the Gibbs samplers for binary and Gaussian images.

pub mod conditionals;
pub mod mh;
mod pixels;
pub mod slice;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use conditionals::{
    log_density_a, sample_a, sample_nuisance_binary, sample_nuisance_gaussian, sample_tau,
};
pub use mh::{mh_step, mh_univariate, MhOutcome};
pub use slice::{slice_step, slice_univariate, SliceOutcome, MAX_SHRINK};

use crate::error::{Error, Result};
use crate::geometry::angle_grid;
use crate::kernel::{basis_len, eigenvalues, BoundaryCoefficients};
use crate::model::{
    binary_loglik, gaussian_loglik, mle_init, partition_stats_binary, partition_stats_gaussian,
    BinaryParams, Family, GaussianParams, Nuisance, PolarObservation, GRID_SIZE,
};
use pixels::PixelCache;

/// Sweeps between full recomputations of the cached radii.
const REBUILD_EVERY: usize = 100;
/// Stepping-out budget for the slice updates of `z`.
const Z_SLICE_STEPS: usize = 50;
const INIT_TAU: f64 = 500.0;
const INIT_A: f64 = 1.0;

/// Prior hyperparameters. `mu0 = None` means the mean observed intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub alpha_a: f64,
    pub beta_a: f64,
    pub alpha_tau: f64,
    pub beta_tau: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub mu0: Option<f64>,
    pub sigma0: f64,
    pub alpha2: f64,
    pub beta2: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            alpha_a: 2.0,
            beta_a: 1.0,
            alpha_tau: 500.0,
            beta_tau: 1.0,
            alpha1: 0.0,
            beta1: 0.0,
            mu0: None,
            sigma0: 1e3,
            alpha2: 1e-2,
            beta2: 1e-2,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha_a", self.alpha_a),
            ("beta_a", self.beta_a),
            ("alpha_tau", self.alpha_tau),
            ("beta_tau", self.beta_tau),
            ("sigma0", self.sigma0),
            ("alpha2", self.alpha2),
            ("beta2", self.beta2),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("alpha1", self.alpha1), ("beta1", self.beta1)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if let Some(m) = self.mu0 {
            if !m.is_finite() {
                return Err(Error::invalid("mu0 must be finite"));
            }
        }
        Ok(())
    }
}

/// Which region is constrained to have the larger parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ordering {
    InsideHigher,
    OutsideHigher,
    #[default]
    None,
}

impl Ordering {
    pub fn as_str(&self) -> &'static str {
        match self {
            Ordering::InsideHigher => "I",
            Ordering::OutsideHigher => "O",
            Ordering::None => "N",
        }
    }

    /// Whether `(inside, outside)` satisfies the constraint.
    pub fn holds(&self, inside: f64, outside: f64) -> bool {
        match self {
            Ordering::InsideHigher => inside >= outside,
            Ordering::OutsideHigher => inside <= outside,
            Ordering::None => true,
        }
    }
}

impl std::str::FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "inside" | "inside_higher" => Ok(Ordering::InsideHigher),
            "o" | "outside" | "outside_higher" => Ok(Ordering::OutsideHigher),
            "n" | "none" => Ok(Ordering::None),
            other => Err(Error::invalid(format!("unknown ordering '{other}' (use I, O or N)"))),
        }
    }
}

impl std::fmt::Display for Ordering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplerKind {
    Mh,
    #[default]
    Slice,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::Mh => "mh",
            SamplerKind::Slice => "slice",
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mh" | "metropolis" => Ok(SamplerKind::Mh),
            "slice" => Ok(SamplerKind::Slice),
            other => Err(Error::invalid(format!("unknown sampler '{other}' (use mh or slice)"))),
        }
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Kept sweeps.
    pub nrun: usize,
    /// Discarded sweeps before the first kept one.
    pub nburn: usize,
    /// Number of cosine/sine pairs; the curve has `2J + 1` coefficients.
    pub j: usize,
    pub sampler: SamplerKind,
    /// Binary: ordering of the success probabilities. Gaussian: of the means.
    pub ordering: Ordering,
    /// Gaussian only: ordering of the standard deviations.
    pub ordering_sd: Ordering,
    pub hyper: Hyperparameters,
    pub seed: u64,
    /// Selects an independent RNG stream for the same seed.
    pub chain_index: u64,
    /// Fixed mean radius instead of the circle MLE.
    pub inimean: Option<f64>,
    /// Keep traces of every parameter.
    pub output_all: bool,
    /// Split per-pixel reductions across threads (results agree to ~1e-10).
    pub parallel: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            nrun: 4000,
            nburn: 1000,
            j: 10,
            sampler: SamplerKind::default(),
            ordering: Ordering::None,
            ordering_sd: Ordering::None,
            hyper: Hyperparameters::default(),
            seed: 0,
            chain_index: 0,
            inimean: None,
            output_all: false,
            parallel: false,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nrun == 0 {
            return Err(Error::invalid("nrun must be at least 1"));
        }
        if self.j == 0 {
            return Err(Error::invalid("J must be at least 1"));
        }
        if let Some(m) = self.inimean {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::invalid(format!("inimean must be positive, got {m}")));
            }
        }
        self.hyper.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub z: Vec<f64>,
    pub a: f64,
    pub tau: f64,
    pub nuisance: Nuisance,
}

/// Per-sweep parameter values for the kept sweeps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Traces {
    pub z: Vec<Vec<f64>>,
    pub a: Vec<f64>,
    pub tau: Vec<f64>,
    pub nuisance: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainDiagnostics {
    /// Single-coefficient updates attempted.
    pub z_updates: usize,
    /// Updates that changed the coefficient.
    pub z_moves: usize,
    pub log_density_evaluations: usize,
    /// Slice updates that ran out of contractions.
    pub slice_failures: usize,
    /// Nuisance draws that needed the half-count correction.
    pub beta_corrections: usize,
    /// Nuisance draws with an empty region.
    pub empty_region_draws: usize,
    /// The starting radius came from a flat profile likelihood.
    pub mle_degenerate: bool,
    /// Fraction of kept boundaries that differ from the previous kept one.
    pub unique_fraction: f64,
}

impl ChainDiagnostics {
    pub fn acceptance_rate(&self) -> f64 {
        if self.z_updates == 0 {
            0.0
        } else {
            self.z_moves as f64 / self.z_updates as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub family: Family,
    /// Mean radius the curve expansion is centred on.
    pub mu: f64,
    /// The 200 reporting angles.
    pub theta: Vec<f64>,
    /// One row of radii per kept sweep.
    pub boundaries: Vec<Vec<f64>>,
    pub traces: Option<Traces>,
    pub diagnostics: ChainDiagnostics,
    pub final_state: ChainState,
}

impl ChainOutput {
    pub fn nrun(&self) -> usize {
        self.boundaries.len()
    }
}

/// Gibbs sampler for binary images.
pub fn gibbs_binary(obs: &PolarObservation, cfg: &FitConfig) -> Result<ChainOutput> {
    obs.check_binary()?;
    run_chain(obs, cfg, Family::Binary)
}

/// Gibbs sampler for images with Gaussian noise.
pub fn gibbs_gaussian(obs: &PolarObservation, cfg: &FitConfig) -> Result<ChainOutput> {
    run_chain(obs, cfg, Family::Gaussian)
}

pub fn gibbs(obs: &PolarObservation, cfg: &FitConfig, family: Family) -> Result<ChainOutput> {
    match family {
        Family::Binary => gibbs_binary(obs, cfg),
        Family::Gaussian => gibbs_gaussian(obs, cfg),
    }
}

fn order_binary(p: BinaryParams, ordering: Ordering) -> BinaryParams {
    if ordering.holds(p.pi1, p.pi2) {
        p
    } else {
        BinaryParams {
            pi1: p.pi2,
            pi2: p.pi1,
        }
    }
}

fn order_gaussian(p: GaussianParams, mean: Ordering, sd: Ordering) -> GaussianParams {
    let mut q = p;
    if !mean.holds(q.mu1, q.mu2) {
        std::mem::swap(&mut q.mu1, &mut q.mu2);
        std::mem::swap(&mut q.sigma1, &mut q.sigma2);
    }
    if !sd.holds(q.sigma1, q.sigma2) {
        if mean == Ordering::None {
            std::mem::swap(&mut q.mu1, &mut q.mu2);
        }
        std::mem::swap(&mut q.sigma1, &mut q.sigma2);
    }
    q
}

fn loglik_shifted(cache: &PixelCache, nuisance: &Nuisance, k: usize, delta: f64) -> f64 {
    match nuisance {
        Nuisance::Binary(p) => binary_loglik(&cache.binary_stats_shifted(k, delta), *p),
        Nuisance::Gaussian(p) => gaussian_loglik(&cache.gaussian_stats_shifted(k, delta), *p),
    }
}

fn run_chain(obs: &PolarObservation, cfg: &FitConfig, family: Family) -> Result<ChainOutput> {
    cfg.validate()?;
    let mut hyper = cfg.hyper;
    if hyper.mu0.is_none() {
        hyper.mu0 = Some(obs.mean_intensity());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.chain_index);

    let init = mle_init(obs, family)?;
    let mu = cfg.inimean.unwrap_or(init.radius);
    let mut coeffs = BoundaryCoefficients::circle(mu, cfg.j)?;
    let mut nuisance = match family {
        Family::Binary => Nuisance::Binary(order_binary(
            partition_stats_binary(obs, &coeffs)?.mle(),
            cfg.ordering,
        )),
        Family::Gaussian => Nuisance::Gaussian(order_gaussian(
            partition_stats_gaussian(obs, &coeffs).mle(),
            cfg.ordering,
            cfg.ordering_sd,
        )),
    };
    let l = basis_len(cfg.j);
    let mut a = INIT_A;
    let mut tau = INIT_TAU;
    let mut spectrum = eigenvalues(a, cfg.j)?;
    let mut cache = PixelCache::new(obs, &coeffs, cfg.parallel);

    let theta = angle_grid(GRID_SIZE);
    let mut boundaries = Vec::with_capacity(cfg.nrun);
    let mut traces = cfg.output_all.then(Traces::default);
    let mut diag = ChainDiagnostics {
        mle_degenerate: init.degenerate && cfg.inimean.is_none(),
        ..ChainDiagnostics::default()
    };

    let mut current_ll = loglik_shifted(&cache, &nuisance, 0, 0.0);
    for sweep in 0..cfg.nburn + cfg.nrun {
        if sweep > 0 && sweep % REBUILD_EVERY == 0 {
            cache.rebuild(&coeffs);
        }

        for k in 0..l {
            let v = spectrum.values()[k];
            let scale = (v / tau).sqrt();
            let zk = coeffs.z[k];
            let mut last = (f64::NAN, f64::NAN);
            let mut evals = 0usize;
            let mut logf = |x: f64| {
                evals += 1;
                let delta = x - zk;
                if !cache.grid_valid_shifted(k, delta) {
                    last = (x, f64::NEG_INFINITY);
                    return f64::NEG_INFINITY;
                }
                let ll = loglik_shifted(&cache, &nuisance, k, delta);
                last = (x, ll);
                ll - 0.5 * tau * x * x / v
            };
            let lf0 = current_ll - 0.5 * tau * zk * zk / v;
            let x = match cfg.sampler {
                SamplerKind::Mh => mh_step(&mut logf, zk, lf0, 0.5 * scale, &mut rng).x,
                SamplerKind::Slice => {
                    let out = slice_step(&mut logf, zk, lf0, scale, Z_SLICE_STEPS, &mut rng);
                    diag.slice_failures += out.failed as usize;
                    out.x
                }
            };
            diag.z_updates += 1;
            diag.log_density_evaluations += evals;
            if x != zk {
                debug_assert_eq!(last.0, x);
                current_ll = last.1;
                cache.apply(k, x - zk);
                coeffs.z[k] = x;
                diag.z_moves += 1;
            }
        }

        tau = sample_tau(&coeffs.z, &spectrum, &hyper, &mut rng);

        nuisance = match family {
            Family::Binary => {
                let stats = cache.binary_stats_shifted(0, 0.0);
                let (p, corrected) = sample_nuisance_binary(&stats, &hyper, cfg.ordering, &mut rng);
                diag.beta_corrections += corrected as usize;
                diag.empty_region_draws += (stats.n1 == 0 || stats.n2 == 0) as usize;
                Nuisance::Binary(p)
            }
            Family::Gaussian => {
                let stats = cache.gaussian_stats_shifted(0, 0.0);
                let (p, empty) = sample_nuisance_gaussian(
                    &stats,
                    &hyper,
                    cfg.ordering,
                    cfg.ordering_sd,
                    &mut rng,
                );
                diag.empty_region_draws += empty as usize;
                Nuisance::Gaussian(p)
            }
        };
        current_ll = loglik_shifted(&cache, &nuisance, 0, 0.0);

        let a_step = sample_a(&coeffs.z, tau, &hyper, &mut rng, a);
        diag.slice_failures += a_step.failed as usize;
        if a_step.x != a {
            a = a_step.x;
            spectrum = eigenvalues(a, cfg.j)?;
        }

        if sweep >= cfg.nburn {
            boundaries.push(theta.iter().map(|&w| coeffs.eval(w)).collect::<Vec<f64>>());
            if let Some(t) = traces.as_mut() {
                t.z.push(coeffs.z.clone());
                t.a.push(a);
                t.tau.push(tau);
                t.nuisance.push(nuisance.as_vec());
            }
        }
    }

    let changed = boundaries.windows(2).filter(|w| w[0] != w[1]).count();
    diag.unique_fraction = (1 + changed) as f64 / boundaries.len() as f64;

    Ok(ChainOutput {
        family,
        mu,
        theta,
        boundaries,
        traces,
        diagnostics: diag,
        final_state: ChainState {
            z: coeffs.z,
            a,
            tau,
            nuisance,
        },
    })
}
