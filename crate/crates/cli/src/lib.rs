//! Subcommands of the `bayesbd` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bayesbd::geometry::{Circle, Ellipse, RadialBoundary, ReferencePoint, SampledCurve, Shape, Triangle};
use bayesbd::imageio::{
    read_fit, read_mask, read_observation, render_svg, write_fit, write_observation, FitRecord,
    SvgMode,
};
use bayesbd::metrics::{dsm_error, hausdorff_error, lebesgue_error};
use bayesbd::model::{Family, PolarObservation};
use bayesbd::posterior::{membership_export, summarize, Edge};
use bayesbd::sampler::{gibbs, FitConfig, Ordering, SamplerKind};
use bayesbd::simulate::{gen_binary, gen_gaussian, DesignKind, DesignSpec, GaussianNoise};

/// Stages stop once fewer unmasked pixels than this remain.
pub const MIN_STAGE_PIXELS: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "bayesbd", version, about = "Bayesian boundary estimation in noisy images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic image with a known boundary.
    Simulate(SimulateArgs),
    /// Fit a boundary to an observation file or a PNG/JPEG image.
    Fit(FitArgs),
    /// Compare a fitted boundary with a reference boundary.
    Metrics(MetricsArgs),
    /// Time fits over a range of image sizes.
    Bench(BenchArgs),
    /// Fit repeatedly, each stage restricted to the previous stage's region.
    Multifit(MultifitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Binary,
    Gaussian,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Binary => Family::Binary,
            FamilyArg::Gaussian => Family::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Ellipse,
    Triangle,
    Circle,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated numbers, e.g. 0.5,0.5")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn parse_center(s: &str) -> Result<ReferencePoint, String> {
    let (x, y) = parse_pair(s)?;
    ReferencePoint::new(x, y).map_err(|e| e.to_string())
}

fn parse_ordering(s: &str) -> Result<Ordering, String> {
    s.parse().map_err(|e: bayesbd::Error| e.to_string())
}

fn parse_sampler(s: &str) -> Result<SamplerKind, String> {
    s.parse().map_err(|e: bayesbd::Error| e.to_string())
}

fn parse_design(s: &str) -> Result<DesignKind, String> {
    s.parse().map_err(|e: bayesbd::Error| e.to_string())
}

fn parse_edge(s: &str) -> Result<Edge, String> {
    s.parse().map_err(|e: bayesbd::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<SvgMode, String> {
    s.parse().map_err(|e: bayesbd::Error| e.to_string())
}

fn parse_level(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("level must lie in (0, 1), got {v}"))
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Image side length; the image has m x m pixels.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(2..))]
    pub m: u32,
    #[arg(long, value_enum, default_value = "ellipse")]
    pub boundary: BoundaryArg,
    /// Ellipse semi-axis along the rotated x direction.
    #[arg(long, default_value_t = 0.35)]
    pub semi_a: f64,
    #[arg(long, default_value_t = 0.25)]
    pub semi_b: f64,
    /// Ellipse rotation in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rotation: f64,
    /// Ellipse centre relative to the reference point, as dx,dy.
    #[arg(long, default_value = "0,0", value_parser = parse_pair, allow_negative_numbers = true)]
    pub offset: (f64, f64),
    /// Triangle height.
    #[arg(long, default_value_t = 0.5)]
    pub height: f64,
    /// Circle radius.
    #[arg(long, default_value_t = 0.3)]
    pub radius: f64,
    /// Pixel design: D (grid), U (uniform) or J (jittered).
    #[arg(long, default_value = "J", value_parser = parse_design)]
    pub design: DesignKind,
    #[arg(long, default_value = "0.5,0.5", value_parser = parse_center)]
    pub center: ReferencePoint,
    #[arg(long)]
    pub pi_in: Option<f64>,
    #[arg(long)]
    pub pi_out: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_in: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_out: Option<f64>,
    #[arg(long)]
    pub sd_in: Option<f64>,
    #[arg(long)]
    pub sd_out: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also plot the generated image.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct FitOptions {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Fixed mean radius instead of the profile-likelihood start.
    #[arg(long)]
    pub inimean: Option<f64>,
    /// Kept sweeps.
    #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u64).range(1..))]
    pub nrun: u64,
    /// Discarded sweeps.
    #[arg(long, default_value_t = 1000)]
    pub nburn: u64,
    /// Number of cosine/sine pairs in the boundary expansion.
    #[arg(long = "J", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub j: u64,
    /// Binary: I, O or N ordering of the success probabilities.
    /// Gaussian: ordering of the means unless --ordering-mean is given.
    #[arg(long, default_value = "N", value_parser = parse_ordering)]
    pub ordering: Ordering,
    #[arg(long, value_parser = parse_ordering)]
    pub ordering_mean: Option<Ordering>,
    #[arg(long, default_value = "N", value_parser = parse_ordering)]
    pub ordering_sd: Ordering,
    #[arg(long, default_value = "slice", value_parser = parse_sampler)]
    pub sampler: SamplerKind,
    /// Keep full parameter traces in the fit file.
    #[arg(long)]
    pub output_all: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Credible level of the uniform band.
    #[arg(long, default_value_t = 0.95, value_parser = parse_level)]
    pub level: f64,
    /// Curve used for pixel membership: outer, mean or inner.
    #[arg(long, default_value = "outer", value_parser = parse_edge)]
    pub edge: Edge,
    /// Binarise image input: grey levels (rescaled to [0,10]) at or above this become 1.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Split pixel reductions across threads (capped by BAYESBD_THREADS).
    #[arg(long)]
    pub parallel: bool,
    /// Plot mode for --svg: data_only, bands_only or overlay.
    #[arg(long, default_value = "overlay", value_parser = parse_mode)]
    pub svg_mode: SvgMode,
}

impl FitOptions {
    pub fn config(&self) -> FitConfig {
        let family: Family = self.family.into();
        FitConfig {
            nrun: self.nrun as usize,
            nburn: self.nburn as usize,
            j: self.j as usize,
            sampler: self.sampler,
            ordering: match family {
                Family::Binary => self.ordering,
                Family::Gaussian => self.ordering_mean.unwrap_or(self.ordering),
            },
            ordering_sd: self.ordering_sd,
            seed: self.seed,
            inimean: self.inimean,
            output_all: self.output_all,
            parallel: self.parallel,
            ..FitConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Observation file or .png/.jpg image.
    #[arg(long)]
    pub input: PathBuf,
    /// Reference point; defaults to the file's centre (0.5,0.5 for images).
    #[arg(long, value_parser = parse_center)]
    pub center: Option<ReferencePoint>,
    /// Mask file excluding pixels from the fit.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[command(flatten)]
    pub fit: FitOptions,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub fit: PathBuf,
    /// `ellipse:a=..,b=..,rot=<deg>,dx=..,dy=..`, `triangle:h=..`, `circle:r=..`,
    /// or a curve/fit file.
    #[arg(long)]
    pub truth: String,
    /// Reference point of a named-shape truth; must match the fit.
    #[arg(long, value_parser = parse_center)]
    pub center: Option<ReferencePoint>,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Image side lengths, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "40,60,80,100")]
    pub sizes: Vec<u32>,
    #[arg(long, value_enum, default_value = "binary")]
    pub family: FamilyArg,
    #[arg(long, default_value = "slice", value_parser = parse_sampler)]
    pub sampler: SamplerKind,
    /// Sweeps per timed fit.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
    pub iters: u64,
    /// Timed fits per size, taken in rounds over all sizes; the fastest is reported.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MultifitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Reference point per stage (repeat the flag); the last is reused.
    #[arg(long = "center", value_parser = parse_center, required = true)]
    pub centers: Vec<ReferencePoint>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    pub stages: u32,
    #[command(flatten)]
    pub fit: FitOptions,
    /// Stage `k` is written to `<prefix>.stage<k>.fit` (and `.svg` with --svg).
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long)]
    pub svg: bool,
}

/// Outcome of a command that can finish with only part of its outputs.
#[derive(Debug, PartialEq, Eq)]
pub enum Completion {
    Complete,
    Partial(String),
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Completion> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, stdout).map(|_| Completion::Complete),
        Command::Fit(a) => cmd_fit(&a, stdout).map(|_| Completion::Complete),
        Command::Metrics(a) => cmd_metrics(&a, stdout).map(|_| Completion::Complete),
        Command::Bench(a) => cmd_bench(&a, stdout).map(|_| Completion::Complete),
        Command::Multifit(a) => cmd_multifit(&a, stdout),
    }
}

/// Usage problems that clap cannot express as flag constraints.
pub fn usage_error(cli: &Cli) -> Option<String> {
    if let Command::Simulate(a) = &cli.command {
        let missing: Vec<&str> = match a.family {
            FamilyArg::Binary => [("--pi-in", a.pi_in), ("--pi-out", a.pi_out)]
                .into_iter()
                .filter(|(_, v)| v.is_none())
                .map(|(n, _)| n)
                .collect(),
            FamilyArg::Gaussian => [
                ("--mu-in", a.mu_in),
                ("--mu-out", a.mu_out),
                ("--sd-in", a.sd_in),
                ("--sd-out", a.sd_out),
            ]
            .into_iter()
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| n)
            .collect(),
        };
        if !missing.is_empty() {
            return Some(format!(
                "--family {} requires {}",
                Family::from(a.family),
                missing.join(", ")
            ));
        }
    }
    None
}

fn truth_shape(a: &SimulateArgs) -> Result<(Shape, String)> {
    Ok(match a.boundary {
        BoundaryArg::Ellipse => (
            Shape::Ellipse(Ellipse::new(a.semi_a, a.semi_b, a.rotation.to_radians(), a.offset)?),
            format!(
                "ellipse:a={},b={},rot={},dx={},dy={}",
                a.semi_a, a.semi_b, a.rotation, a.offset.0, a.offset.1
            ),
        ),
        BoundaryArg::Triangle => (
            Shape::Triangle(Triangle::new(a.height)?),
            format!("triangle:h={}", a.height),
        ),
        BoundaryArg::Circle => (Shape::Circle(Circle::new(a.radius)?), format!("circle:r={}", a.radius)),
    })
}

pub fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let (shape, truth) = truth_shape(a)?;
    let design = DesignSpec::new(a.design, a.m as usize)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (obs, params) = match a.family {
        FamilyArg::Binary => {
            let (Some(pi_in), Some(pi_out)) = (a.pi_in, a.pi_out) else {
                bail!("--family binary requires --pi-in and --pi-out");
            };
            let obs = gen_binary(design, pi_in, pi_out, &shape, a.center, &mut rng)?;
            (obs, format!("pi_in={pi_in} pi_out={pi_out}"))
        }
        FamilyArg::Gaussian => {
            let (Some(mu_in), Some(mu_out), Some(sd_in), Some(sd_out)) = (a.mu_in, a.mu_out, a.sd_in, a.sd_out)
            else {
                bail!("--family gaussian requires --mu-in, --mu-out, --sd-in and --sd-out");
            };
            let noise = GaussianNoise {
                mu_in,
                mu_out,
                sd_in,
                sd_out,
            };
            let obs = gen_gaussian(design, noise, &shape, a.center, &mut rng)?;
            (obs, format!("mu_in={mu_in} mu_out={mu_out} sd_in={sd_in} sd_out={sd_out}"))
        }
    };
    let generator = format!(
        "simulate family={} m={} truth={truth} design={} center={},{} {params} seed={}",
        Family::from(a.family),
        a.m,
        a.design.as_str(),
        a.center.x,
        a.center.y,
        a.seed
    );
    write_observation(&a.out, &obs, &generator)
        .with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(svg) = &a.svg {
        render_svg(&obs, None, SvgMode::DataOnly, svg)
            .with_context(|| format!("writing {}", svg.display()))?;
    }
    writeln!(stdout, "wrote {} ({} pixels)", a.out.display(), obs.len())?;
    Ok(())
}

fn is_image(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("png" | "jpg" | "jpeg")
    )
}

/// Reads an observation file or image, applying a centre override and threshold.
pub fn load_input(path: &Path, center: Option<ReferencePoint>, threshold: Option<f64>) -> Result<PolarObservation> {
    if is_image(path) {
        let c = center.unwrap_or(ReferencePoint::image_center());
        return bayesbd::imageio::load_image(path, c, threshold)
            .with_context(|| format!("loading {}", path.display()));
    }
    let file = read_observation(path).with_context(|| format!("reading {}", path.display()))?;
    let mut obs = file.obs;
    if let Some(c) = center {
        if c != obs.center() {
            obs = obs.recenter(c);
        }
    }
    if let Some(t) = threshold {
        let y: Vec<f64> = obs.intensity().iter().map(|&v| (v >= t) as u8 as f64).collect();
        let mask = obs.mask().map(<[bool]>::to_vec);
        obs = PolarObservation::new(y, obs.theta().to_vec(), obs.r().to_vec(), obs.center(), mask)?;
    }
    Ok(obs)
}

/// Runs one fit and builds its output record.
pub fn fit_observation(
    obs: &PolarObservation,
    opts: &FitOptions,
    input_label: &str,
) -> Result<(FitRecord, bayesbd::posterior::PosteriorSummary)> {
    let cfg = opts.config();
    let family: Family = opts.family.into();
    let chain = gibbs(obs, &cfg, family)?;
    let summary = summarize(&chain, opts.level)?;
    let membership = membership_export(&summary, obs, opts.edge);
    let d = &chain.diagnostics;
    let mut record = FitRecord::new(&summary, membership, obs.center())
        .with_meta("family", family)
        .with_meta("input", input_label)
        .with_meta("pixels", obs.len())
        .with_meta("active_pixels", obs.active_count())
        .with_meta("sampler", cfg.sampler)
        .with_meta("seed", cfg.seed)
        .with_meta("nrun", cfg.nrun)
        .with_meta("nburn", cfg.nburn)
        .with_meta("J", cfg.j)
        .with_meta("ordering", cfg.ordering)
        .with_meta("ordering_sd", cfg.ordering_sd)
        .with_meta("inimean", cfg.inimean.map_or("none".to_string(), |v| v.to_string()))
        .with_meta("edge", opts.edge.as_str())
        .with_meta("mean_radius", chain.mu)
        .with_meta("acceptance_rate", d.acceptance_rate())
        .with_meta("unique_fraction", d.unique_fraction)
        .with_meta("slice_failures", d.slice_failures)
        .with_meta("beta_corrections", d.beta_corrections)
        .with_meta("empty_region_draws", d.empty_region_draws)
        .with_meta("mle_degenerate", d.mle_degenerate);
    if family == Family::Gaussian {
        record = record.with_meta("ordering_mean", cfg.ordering);
    }
    record.traces = chain.traces;
    Ok((record, summary))
}

pub fn cmd_fit(a: &FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut obs = load_input(&a.input, a.center, a.fit.threshold)?;
    if let Some(m) = &a.mask {
        let mask = read_mask(m).with_context(|| format!("reading {}", m.display()))?;
        obs = obs.with_mask(Some(mask))?;
    }
    let (record, summary) = fit_observation(&obs, &a.fit, &a.input.display().to_string())?;
    write_fit(&a.out, &record).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(svg) = &a.svg {
        render_svg(&obs, Some(&summary), a.fit.svg_mode, svg)
            .with_context(|| format!("writing {}", svg.display()))?;
    }
    writeln!(
        stdout,
        "wrote {}: L0 {:.4}, acceptance {:.3}",
        a.out.display(),
        record.l0,
        summary.acceptance_rate()
    )?;
    Ok(())
}

/// A reference boundary and the reference point it is defined about.
pub struct Truth {
    pub boundary: Box<dyn RadialBoundary>,
    pub center: Option<ReferencePoint>,
}

fn shape_params(spec: &str) -> Result<Vec<(String, f64)>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').with_context(|| format!("expected key=value, got '{kv}'"))?;
            let v: f64 = v.trim().parse().with_context(|| format!("bad number in '{kv}'"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Parses `--truth`: a named shape or a curve/fit file.
pub fn parse_truth(spec: &str) -> Result<Truth> {
    if let Some((name, rest)) = spec.split_once(':') {
        if matches!(name, "ellipse" | "triangle" | "circle") {
            let params = shape_params(rest)?;
            let get = |k: &str, default: Option<f64>| -> Result<f64> {
                params
                    .iter()
                    .find(|(n, _)| n == k)
                    .map(|(_, v)| *v)
                    .or(default)
                    .with_context(|| format!("{name} truth needs {k}="))
            };
            for (k, _) in &params {
                let known: &[&str] = match name {
                    "ellipse" => &["a", "b", "rot", "dx", "dy"],
                    "triangle" => &["h"],
                    _ => &["r"],
                };
                ensure!(known.contains(&k.as_str()), "unknown {name} parameter '{k}'");
            }
            let boundary: Box<dyn RadialBoundary> = match name {
                "ellipse" => Box::new(Ellipse::new(
                    get("a", None)?,
                    get("b", None)?,
                    get("rot", Some(0.0))?.to_radians(),
                    (get("dx", Some(0.0))?, get("dy", Some(0.0))?),
                )?),
                "triangle" => Box::new(Triangle::new(get("h", None)?)?),
                _ => Box::new(Circle::new(get("r", None)?)?),
            };
            return Ok(Truth { boundary, center: None });
        }
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading truth {spec}"))?;
    if text.starts_with("bayesbd-fit") {
        let rec = read_fit(path)?;
        return Ok(Truth {
            boundary: Box::new(SampledCurve::new(rec.estimate)?),
            center: Some(rec.center),
        });
    }
    let (center, radii) = parse_curve(&text).with_context(|| format!("parsing truth {spec}"))?;
    Ok(Truth {
        boundary: Box::new(SampledCurve::new(radii)?),
        center,
    })
}

/// Curve file: optional `center x y` line, then radii at equally spaced angles
/// starting from 0. `#` starts a comment.
pub fn parse_curve(text: &str) -> Result<(Option<ReferencePoint>, Vec<f64>)> {
    let mut center = None;
    let mut radii = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line == "bayesbd-curve v1" {
            continue;
        }
        if let Some(rest) = line.strip_prefix("center") {
            let v: Vec<f64> = rest.split_whitespace().map(str::parse).collect::<Result<_, _>>()?;
            ensure!(v.len() == 2, "center needs two numbers");
            center = Some(ReferencePoint::new(v[0], v[1])?);
            continue;
        }
        for tok in line.split_whitespace() {
            radii.push(tok.parse::<f64>().with_context(|| format!("bad radius '{tok}'"))?);
        }
    }
    Ok((center, radii))
}

fn same_point(a: ReferencePoint, b: ReferencePoint) -> bool {
    (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12
}

pub fn cmd_metrics(a: &MetricsArgs, stdout: &mut dyn Write) -> Result<()> {
    let rec = read_fit(&a.fit).with_context(|| format!("reading {}", a.fit.display()))?;
    let truth = parse_truth(&a.truth)?;
    for c in [truth.center, a.center].into_iter().flatten() {
        ensure!(
            same_point(c, rec.center),
            "reference points differ: fit uses ({}, {}), truth uses ({}, {})",
            rec.center.x,
            rec.center.y,
            c.x,
            c.y
        );
    }
    let est = SampledCurve::new(rec.estimate.clone())?;
    let report = format!(
        "lebesgue_error {}\ndsm_error {}\nhausdorff_error {}\n",
        lebesgue_error(&est, truth.boundary.as_ref()),
        dsm_error(&est, truth.boundary.as_ref()),
        hausdorff_error(&est, truth.boundary.as_ref())
    );
    stdout.write_all(report.as_bytes())?;
    if let Some(out) = &a.out {
        std::fs::write(out, &report).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

/// Ordinary least squares `y = intercept + slope * x` with R².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sst: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if sst == 0.0 { 1.0 } else { 1.0 - sse / sst };
    Some(LinearFit { intercept, slope, r2 })
}

pub fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> Result<()> {
    ensure!(!a.sizes.is_empty(), "--sizes needs at least one value");
    let truth = Triangle::new(0.5)?;
    let center = ReferencePoint::image_center();
    let family: Family = a.family.into();
    let cfg = FitConfig {
        nrun: a.iters as usize,
        nburn: 0,
        sampler: a.sampler,
        seed: a.seed,
        ordering: Ordering::InsideHigher,
        ..FitConfig::default()
    };
    let mut report = format!(
        "# family {} sampler {} sweeps {}\nm n seconds evaluations\n",
        family, a.sampler, a.iters
    );
    let mut images = Vec::new();
    for &m in &a.sizes {
        ensure!(m >= 2, "sizes must be at least 2");
        let design = DesignSpec::new(DesignKind::Jittered, m as usize)?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let obs = match family {
            Family::Binary => gen_binary(design, 0.5, 0.2, &truth, center, &mut rng)?,
            Family::Gaussian => {
                let noise = GaussianNoise {
                    mu_in: 4.0,
                    mu_out: 1.0,
                    sd_in: 1.5,
                    sd_out: 1.0,
                };
                gen_gaussian(design, noise, &truth, center, &mut rng)?
            }
        };
        images.push(obs);
    }
    // Repeats cycle through the sizes so slow spells of the machine hit every size.
    let mut best = vec![f64::INFINITY; images.len()];
    let mut evals = vec![0; images.len()];
    for _ in 0..a.repeats {
        for (k, obs) in images.iter().enumerate() {
            let t = Instant::now();
            let chain = gibbs(obs, &cfg, family)?;
            best[k] = best[k].min(t.elapsed().as_secs_f64());
            evals[k] = chain.diagnostics.log_density_evaluations;
        }
    }
    let mut ns = Vec::new();
    for (k, &m) in a.sizes.iter().enumerate() {
        let n = images[k].len();
        report.push_str(&format!("{m} {n} {:.6} {}\n", best[k], evals[k]));
        ns.push(n as f64);
    }
    let secs = best;
    match linear_fit(&ns, &secs) {
        Some(f) => report.push_str(&format!(
            "fit seconds = {:.6e} + {:.6e} * n, R2 = {:.6}\n",
            f.intercept, f.slope, f.r2
        )),
        None => report.push_str("fit none (needs at least two sizes)\n"),
    }
    stdout.write_all(report.as_bytes())?;
    if let Some(out) = &a.out {
        std::fs::write(out, &report).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

pub fn stage_path(prefix: &Path, stage: usize, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(format!(".stage{stage}.{ext}"));
    PathBuf::from(s)
}

pub fn cmd_multifit(a: &MultifitArgs, stdout: &mut dyn Write) -> Result<Completion> {
    let mut obs = load_input(&a.input, Some(a.centers[0]), a.fit.threshold)?;
    for stage in 1..=a.stages as usize {
        let center = a.centers[(stage - 1).min(a.centers.len() - 1)];
        if stage > 1 {
            obs = obs.recenter(center);
        }
        let active = obs.active_count();
        if active < MIN_STAGE_PIXELS {
            let msg = format!(
                "stage {stage}: only {active} pixels remain inside the previous region (need {MIN_STAGE_PIXELS}); stopping"
            );
            writeln!(stdout, "{msg}")?;
            return Ok(Completion::Partial(msg));
        }
        let label = format!("{} stage={stage}", a.input.display());
        let (record, summary) = fit_observation(&obs, &a.fit, &label)?;
        let out = stage_path(&a.out_prefix, stage, "fit");
        write_fit(&out, &record).with_context(|| format!("writing {}", out.display()))?;
        if a.svg {
            render_svg(&obs, Some(&summary), a.fit.svg_mode, &stage_path(&a.out_prefix, stage, "svg"))?;
        }
        writeln!(stdout, "stage {stage}: {active} pixels, wrote {}", out.display())?;
        // Next stage keeps the pixels inside this stage's region.
        let inside = &record.membership;
        let mask: Vec<bool> = (0..obs.len()).map(|i| inside[i] && obs.is_active(i)).collect();
        obs = obs.with_mask(Some(mask))?;
    }
    Ok(Completion::Complete)
}
