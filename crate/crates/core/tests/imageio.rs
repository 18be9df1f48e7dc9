#![cfg(feature = "image-io")]

use bayesbd::imageio::{load_image, read_fit, read_observation, render_svg_string, write_fit, write_observation, FitRecord, SvgMode};
use bayesbd::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIDE: u32 = 60;

/// Disk of radius 0.3 about (0.55, 0.45), with 15% of pixels flipped.
fn write_disk_png(path: &std::path::Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let img = image::GrayImage::from_fn(SIDE, SIDE, |col, row| {
        let x = (col as f64 + 0.5) / SIDE as f64;
        let y = 1.0 - (row as f64 + 0.5) / SIDE as f64;
        let mut on = (x - 0.55).hypot(y - 0.45) < 0.3;
        if rng.random::<f64>() < 0.15 {
            on = !on;
        }
        image::Luma([if on { 230 } else { 20 }])
    });
    img.save(path).unwrap();
}

#[test]
fn png_disk_is_recovered_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let png = dir.path().join("disk.png");
    write_disk_png(&png);
    let center = ReferencePoint::new(0.55, 0.45).unwrap();
    let obs = load_image(&png, center, Some(5.0)).unwrap();
    assert_eq!(obs.len(), (SIDE * SIDE) as usize);

    let cfg = FitConfig {
        nrun: 600,
        nburn: 300,
        ordering: Ordering::InsideHigher,
        seed: 3,
        ..FitConfig::default()
    };
    let chain = gibbs_binary(&obs, &cfg).unwrap();
    let s = summarize(&chain, 0.95).unwrap();
    let pixel = 1.0 / SIDE as f64;
    for &r in &s.estimate {
        assert!((r - 0.3).abs() < 2.0 * pixel, "radius {r}");
    }

    let membership = membership_export(&s, &obs, Edge::Mean);
    assert_eq!(membership.len(), obs.len());
    // Membership follows the input pixel order.
    for (i, (x, y)) in obs.rect_points().into_iter().enumerate() {
        let d = (x - 0.55).hypot(y - 0.45);
        if (d - 0.3).abs() > 3.0 * pixel {
            assert_eq!(membership[i], d < 0.3, "pixel {i} at ({x}, {y})");
        }
    }

    let fit = dir.path().join("disk.fit");
    write_fit(&fit, &FitRecord::new(&s, membership.clone(), center).with_meta("seed", 3)).unwrap();
    let back = read_fit(&fit).unwrap();
    assert_eq!(back.membership, membership);
    assert_eq!(back.estimate, s.estimate);
    assert_eq!(back.center, center);
}

#[test]
fn observation_file_round_trip_keeps_every_bit() {
    let dir = tempfile::tempdir().unwrap();
    let design = DesignSpec::new(DesignKind::Uniform, 15).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let noise = GaussianNoise { mu_in: 1.0, mu_out: 0.0, sd_in: 0.3, sd_out: 0.7 };
    let obs = gen_gaussian(design, noise, &Circle::new(0.2).unwrap(), ReferencePoint::image_center(), &mut rng).unwrap();
    let path = dir.path().join("a.obs");
    write_observation(&path, &obs, "test").unwrap();
    let back = read_observation(&path).unwrap();
    assert_eq!(back.obs, obs);
    assert_eq!(back.generator, "test");
}

#[test]
fn ellipse_overlay_stays_inside_the_viewbox() {
    let design = DesignSpec::new(DesignKind::Deterministic, 20).unwrap();
    let truth = Ellipse::new(0.35, 0.25, 60f64.to_radians(), (0.1, 0.1)).unwrap();
    let obs = gen_binary(design, 0.9, 0.1, &truth, ReferencePoint::image_center(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let chain = gibbs_binary(&obs, &FitConfig { nrun: 200, nburn: 100, ..FitConfig::default() }).unwrap();
    let s = summarize(&chain, 0.95).unwrap();
    let svg = render_svg_string(&obs, Some(&s), SvgMode::Overlay).unwrap();
    let vb: Vec<f64> = svg.split("viewBox=\"").nth(1).unwrap().split('"').next().unwrap()
        .split(' ').map(|v| v.parse().unwrap()).collect();
    let mut count = 0;
    for d in svg.split(" d=\"").skip(1) {
        let nums: Vec<f64> = d.split('"').next().unwrap()
            .split(['M', 'L', 'Z', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().unwrap())
            .collect();
        for p in nums.chunks(2) {
            assert!((0.0..=vb[2]).contains(&p[0]) && (0.0..=vb[3]).contains(&p[1]));
            count += 1;
        }
    }
    assert_eq!(count, 3 * 200);
    assert_eq!(svg.matches("class=\"pixel\"").count(), 400);
}
