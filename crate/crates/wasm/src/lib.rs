//! Browser bindings for the demo page in `www/`.
//!
//! The logic lives in plain functions so it can be tested natively; the
//! `#[wasm_bindgen]` items only convert errors.

use std::fmt::Write as _;

use bayesbd::imageio::{render_svg_string, SvgMode};
use bayesbd::kernel::{eigenvalues, BoundaryCoefficients};
use bayesbd::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use wasm_bindgen::prelude::*;

/// Settings for one simulated image and its fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemoSettings {
    pub gaussian: bool,
    pub triangle: bool,
    pub m: usize,
    /// Contrast: success probabilities (binary) or means (Gaussian) inside and outside.
    pub inside: f64,
    pub outside: f64,
    pub nrun: usize,
    pub nburn: usize,
    pub slice: bool,
    pub seed: u64,
}

impl Default for DemoSettings {
    fn default() -> Self {
        Self {
            gaussian: false,
            triangle: false,
            m: 40,
            inside: 0.5,
            outside: 0.2,
            nrun: 500,
            nburn: 200,
            slice: false,
            seed: 1,
        }
    }
}

pub struct Demo {
    obs: PolarObservation,
    chain: ChainOutput,
    truth: Shape,
}

impl Demo {
    pub fn run(s: &DemoSettings) -> Result<Self> {
        let truth = if s.triangle {
            Shape::Triangle(Triangle::new(0.5)?)
        } else {
            Shape::Ellipse(Ellipse::new(0.35, 0.25, 60f64.to_radians(), (0.1, 0.1))?)
        };
        let design = DesignSpec::new(DesignKind::Jittered, s.m)?;
        let center = ReferencePoint::image_center();
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let (obs, family) = if s.gaussian {
            let noise = GaussianNoise {
                mu_in: s.inside,
                mu_out: s.outside,
                sd_in: 1.0,
                sd_out: 1.0,
            };
            (gen_gaussian(design, noise, &truth, center, &mut rng)?, Family::Gaussian)
        } else {
            (gen_binary(design, s.inside, s.outside, &truth, center, &mut rng)?, Family::Binary)
        };
        let ordering = if s.inside >= s.outside {
            Ordering::InsideHigher
        } else {
            Ordering::OutsideHigher
        };
        let cfg = FitConfig {
            nrun: s.nrun,
            nburn: s.nburn,
            sampler: if s.slice { SamplerKind::Slice } else { SamplerKind::Mh },
            ordering,
            seed: s.seed,
            ..FitConfig::default()
        };
        let chain = gibbs(&obs, &cfg, family)?;
        Ok(Self { obs, chain, truth })
    }

    pub fn summary(&self, level: f64) -> Result<PosteriorSummary> {
        summarize(&self.chain, level)
    }

    /// Plot of the image, the mean curve and the band at `level`.
    pub fn svg(&self, level: f64) -> Result<String> {
        render_svg_string(&self.obs, Some(&self.summary(level)?), SvgMode::Overlay)
    }

    /// Lebesgue error of the posterior mean against the simulated truth.
    pub fn error(&self) -> Result<f64> {
        let est = self
            .summary(0.95)?
            .boundary(Edge::Mean)
            .ok_or_else(|| Error::InvalidArgument("mean curve is not positive".into()))?;
        Ok(lebesgue_error(&est, &self.truth))
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.chain.diagnostics.acceptance_rate()
    }
}

/// `count` boundaries drawn from the prior with mean radius 0.25, as an SVG.
pub fn prior_draws_svg(a: f64, tau: f64, j: usize, count: usize, seed: u64) -> Result<String> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let spec = eigenvalues(a, j)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = angle_grid(200);
    let size = 400.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    for k in 0..count {
        let z: Vec<f64> = spec
            .values()
            .iter()
            .map(|v| {
                let e: f64 = StandardNormal.sample(&mut rng);
                e * (v / tau).sqrt()
            })
            .collect();
        let c = BoundaryCoefficients::new(0.25, z)?;
        let mut d = String::new();
        for (i, w) in grid.iter().enumerate() {
            let r = c.eval(*w).max(0.0);
            let (x, y) = (0.5 + r * w.cos(), 0.5 + r * w.sin());
            let _ = write!(d, "{}{:.2} {:.2} ", if i == 0 { "M" } else { "L" }, x * size, (1.0 - y) * size);
        }
        let hue = (k * 360 / count.max(1)) % 360;
        let _ = writeln!(
            out,
            r#"<path class="draw" d="{d}Z" fill="none" stroke="hsl({hue},60%,45%)" stroke-width="1.5"/>"#
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A fitted demo held on the JavaScript side.
#[wasm_bindgen]
pub struct DemoFit {
    inner: Demo,
}

#[wasm_bindgen]
impl DemoFit {
    /// Simulates an image and fits it.
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        gaussian: bool,
        triangle: bool,
        m: usize,
        inside: f64,
        outside: f64,
        nrun: usize,
        nburn: usize,
        slice: bool,
        seed: u64,
    ) -> std::result::Result<DemoFit, JsError> {
        let s = DemoSettings {
            gaussian,
            triangle,
            m,
            inside,
            outside,
            nrun,
            nburn,
            slice,
            seed,
        };
        Demo::run(&s).map(|inner| DemoFit { inner }).map_err(js_err)
    }

    /// Overlay plot with the band recomputed at `level`.
    pub fn svg(&self, level: f64) -> std::result::Result<String, JsError> {
        self.inner.svg(level).map_err(js_err)
    }

    pub fn error(&self) -> std::result::Result<f64, JsError> {
        self.inner.error().map_err(js_err)
    }

    #[wasm_bindgen(js_name = acceptanceRate)]
    pub fn acceptance_rate(&self) -> f64 {
        self.inner.acceptance_rate()
    }

    /// Band half-width multiplier at `level`.
    #[wasm_bindgen(js_name = bandWidth)]
    pub fn band_width(&self, level: f64) -> std::result::Result<f64, JsError> {
        self.inner.summary(level).map(|s| s.l0).map_err(js_err)
    }
}

#[wasm_bindgen(js_name = priorDraws)]
pub fn prior_draws(a: f64, tau: f64, j: usize, count: usize, seed: u64) -> std::result::Result<String, JsError> {
    prior_draws_svg(a, tau, j, count, seed).map_err(js_err)
}

/// Kernel eigenvalues `v_1..v_{2J+1}`.
#[wasm_bindgen]
pub fn spectrum(a: f64, j: usize) -> std::result::Result<Vec<f64>, JsError> {
    eigenvalues(a, j).map(|s| s.values().to_vec()).map_err(js_err)
}
