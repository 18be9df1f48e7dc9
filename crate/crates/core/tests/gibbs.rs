use bayesbd::posterior::quantile_type7;
use bayesbd::prelude::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ellipse() -> Ellipse {
    Ellipse::new(0.35, 0.25, 60f64.to_radians(), (0.1, 0.1)).unwrap()
}

fn gaussian_image(m: usize, seed: u64) -> PolarObservation {
    let noise = GaussianNoise {
        mu_in: 4.0,
        mu_out: 1.0,
        sd_in: 1.5,
        sd_out: 1.0,
    };
    let design = DesignSpec::new(DesignKind::Jittered, m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_gaussian(design, noise, &ellipse(), ReferencePoint::image_center(), &mut rng).unwrap()
}

fn config(sampler: SamplerKind, nrun: usize, seed: u64) -> FitConfig {
    FitConfig {
        nrun,
        nburn: 500,
        sampler,
        ordering: Ordering::InsideHigher,
        seed,
        output_all: true,
        ..FitConfig::default()
    }
}

fn mean_error(chain: &ChainOutput) -> f64 {
    let s = summarize(chain, 0.95).unwrap();
    lebesgue_error(&s.boundary(Edge::Mean).unwrap(), &ellipse())
}

#[test]
fn gaussian_ellipse_is_recovered_by_both_samplers() {
    let obs = gaussian_image(50, 1);
    let slice = gibbs_gaussian(&obs, &config(SamplerKind::Slice, 1000, 2)).unwrap();
    let mh = gibbs_gaussian(&obs, &config(SamplerKind::Mh, 1000, 3)).unwrap();
    let (es, em) = (mean_error(&slice), mean_error(&mh));
    assert!(es < 0.02, "slice error {es}");
    assert!(em < 0.02, "MH error {em}");

    let a = summarize(&slice, 0.95).unwrap();
    let b = summarize(&mh, 0.95).unwrap();
    let between = lebesgue_error(&a.boundary(Edge::Mean).unwrap(), &b.boundary(Edge::Mean).unwrap());
    assert!(between < 0.02, "samplers disagree by {between}");

    for chain in [&slice, &mh] {
        let t = chain.traces.as_ref().unwrap();
        assert!(t.a.iter().all(|&a| a > 0.0));
        assert!(t.tau.iter().all(|&tau| tau > 0.0));
        for nu in &t.nuisance {
            assert!(nu[0] >= nu[2], "mean ordering violated: {nu:?}");
            assert!(nu[1] > 0.0 && nu[3] > 0.0);
        }
    }
}

/// Geweke diagnostic with batch-means variances.
fn geweke(x: &[f64]) -> f64 {
    fn mean_and_var(x: &[f64]) -> (f64, f64) {
        let batches = 20;
        let size = x.len() / batches;
        let means: Vec<f64> = x.chunks_exact(size).map(|c| c.iter().sum::<f64>() / size as f64).collect();
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let v = means.iter().map(|b| (b - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        (m, v / means.len() as f64)
    }
    let n = x.len();
    let (ma, va) = mean_and_var(&x[..n / 10]);
    let (mb, vb) = mean_and_var(&x[n / 2..]);
    (ma - mb) / (va + vb).sqrt()
}

#[test]
fn binary_chain_passes_geweke() {
    let design = DesignSpec::new(DesignKind::Jittered, 50).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let obs = gen_binary(design, 0.5, 0.2, &ellipse(), ReferencePoint::image_center(), &mut rng).unwrap();
    let chain = gibbs_binary(&obs, &config(SamplerKind::Slice, 2000, 5)).unwrap();
    let mean_radius: Vec<f64> = chain
        .boundaries
        .iter()
        .map(|row| row.iter().sum::<f64>() / row.len() as f64)
        .collect();
    let z = geweke(&mean_radius);
    assert!(z.abs() < 3.0, "Geweke Z = {z}");
    let pi1: Vec<f64> = chain.traces.as_ref().unwrap().nuisance.iter().map(|n| n[0]).collect();
    let z = geweke(&pi1);
    assert!(z.abs() < 3.0, "Geweke Z for pi1 = {z}");
}

fn random_chain(rows: usize, seed: u64) -> ChainOutput {
    let design = DesignSpec::new(DesignKind::Deterministic, 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let obs = gen_binary(design, 0.9, 0.1, &Circle::new(0.3).unwrap(), ReferencePoint::image_center(), &mut rng).unwrap();
    let mut chain = gibbs_binary(&obs, &FitConfig { nrun: 2, nburn: 0, ..FitConfig::default() }).unwrap();
    chain.boundaries = (0..rows)
        .map(|_| chain.theta.iter().map(|_| 0.2 + 0.1 * rand::Rng::random::<f64>(&mut rng)).collect())
        .collect();
    chain
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn band_widens_with_level(seed in 0u64..1000, lo in 0.5f64..0.9, gap in 0.01f64..0.09) {
        let chain = random_chain(60, seed);
        let a = summarize(&chain, lo).unwrap();
        let b = summarize(&chain, lo + gap).unwrap();
        prop_assert!(a.l0 <= b.l0);
        for i in 0..a.theta.len() {
            prop_assert!(b.lower[i] <= a.lower[i] && a.upper[i] <= b.upper[i]);
            prop_assert!(a.lower[i] <= a.estimate[i] && a.estimate[i] <= a.upper[i]);
        }
    }

    #[test]
    fn summary_ignores_sweep_order(seed in 0u64..1000) {
        let chain = random_chain(40, seed);
        let mut shuffled = chain.clone();
        shuffled.boundaries.shuffle(&mut ChaCha8Rng::seed_from_u64(seed + 1));
        let a = summarize(&chain, 0.95).unwrap();
        let b = summarize(&shuffled, 0.95).unwrap();
        for i in 0..a.theta.len() {
            prop_assert!((a.estimate[i] - b.estimate[i]).abs() < 1e-12);
            prop_assert!((a.upper[i] - b.upper[i]).abs() < 1e-12);
        }
        prop_assert!((a.l0 - b.l0).abs() < 1e-12);
    }
}

#[test]
fn estimate_is_the_row_mean_and_band_is_uniform() {
    let chain = random_chain(50, 8);
    let s = summarize(&chain, 0.9).unwrap();
    for (i, e) in s.estimate.iter().enumerate() {
        let mean = chain.boundaries.iter().map(|r| r[i]).sum::<f64>() / 50.0;
        assert!((e - mean).abs() < 1e-12);
    }
    // The stated fraction of draws lies entirely inside the band.
    let inside = chain
        .boundaries
        .iter()
        .filter(|row| row.iter().enumerate().all(|(i, r)| s.lower[i] <= *r && *r <= s.upper[i]))
        .count();
    let mut u: Vec<f64> = chain
        .boundaries
        .iter()
        .map(|row| row.iter().enumerate().map(|(i, r)| (r - s.estimate[i]).abs() / s.sd[i]).fold(0.0, f64::max))
        .collect();
    assert!((quantile_type7(&mut u, 0.9) - s.l0).abs() < 1e-12);
    assert!(inside as f64 >= 0.9 * 50.0 - 1.0, "{inside} of 50 inside");
}

#[test]
fn membership_matches_a_dense_oracle() {
    let chain = random_chain(30, 9);
    let s = summarize(&chain, 0.95).unwrap();
    let design = DesignSpec::new(DesignKind::Uniform, 100).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let obs = gen_binary(design, 1.0, 0.0, &Circle::new(0.3).unwrap(), ReferencePoint::image_center(), &mut rng).unwrap();
    for edge in [Edge::Inner, Edge::Mean, Edge::Outer] {
        let got = membership_export(&s, &obs, edge);
        // Oracle: ray casting against the polygon through the 200 curve points.
        let poly: Vec<(f64, f64)> = s.theta.iter().zip(s.curve(edge)).map(|(w, r)| (r * w.cos(), r * w.sin())).collect();
        let agree = (0..obs.len())
            .filter(|&i| {
                let p = obs.point(i);
                let (x, y) = (p.r * p.theta.cos(), p.r * p.theta.sin());
                let mut crossings = false;
                for k in 0..poly.len() {
                    let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
                    if (a.1 > y) != (b.1 > y) && x < a.0 + (y - a.1) * (b.0 - a.0) / (b.1 - a.1) {
                        crossings = !crossings;
                    }
                }
                got[i] == crossings
            })
            .count();
        assert!(agree as f64 >= 0.999 * obs.len() as f64, "{edge:?}: {agree} of {}", obs.len());
    }
}
