//! Bayesian estimation of star-shaped boundaries in noisy images.
//!
//! A closed curve around a reference point is written in polar form as
//! `r(w) = mu + sum_k z_k psi_k(w / 2 pi)` with a Fourier basis `psi_k` and a
//! squared-exponential Gaussian-process prior on the circle. Pixels inside
//! and outside the curve follow two different Bernoulli or Gaussian
//! distributions. A Gibbs sampler draws boundaries from the posterior, and
//! [`posterior::summarize`] turns the draws into a mean curve with a uniform
//! credible band.
//!
//! ```no_run
//! use bayesbd::prelude::*;
//! use rand::SeedableRng;
//!
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let truth = Ellipse::new(0.35, 0.25, 60f64.to_radians(), (0.1, 0.1)).unwrap();
//! let design = DesignSpec::new(DesignKind::Jittered, 100).unwrap();
//! let obs = gen_binary(design, 0.5, 0.2, &truth, ReferencePoint::image_center(), &mut rng).unwrap();
//! let chain = gibbs_binary(&obs, &FitConfig::default()).unwrap();
//! let summary = summarize(&chain, 0.95).unwrap();
//! let est = summary.boundary(Edge::Mean).unwrap();
//! println!("Lebesgue error {}", lebesgue_error(&est, &truth));
//! ```

pub mod error;
pub mod geometry;
pub mod imageio;
pub mod kernel;
pub mod metrics;
pub mod model;
pub mod posterior;
pub mod sampler;
pub mod simulate;
mod special;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{
        angle_grid, inside, Circle, Ellipse, PolarPoint, RadialBoundary, ReferencePoint,
        SampledCurve, Shape, Triangle,
    };
    pub use crate::kernel::{eigenvalues, BoundaryCoefficients, EigenSpectrum};
    pub use crate::metrics::{dsm_error, hausdorff_error, lebesgue_error};
    pub use crate::model::{Family, PolarObservation};
    pub use crate::posterior::{membership_export, summarize, Edge, PosteriorSummary};
    pub use crate::sampler::{
        gibbs, gibbs_binary, gibbs_gaussian, ChainOutput, FitConfig, Hyperparameters, Ordering,
        SamplerKind,
    };
    pub use crate::simulate::{gen_binary, gen_gaussian, DesignKind, DesignSpec, GaussianNoise};
}
