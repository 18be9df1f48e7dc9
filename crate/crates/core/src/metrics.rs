//! Discrepancies between two boundaries sharing a reference point.

use std::f64::consts::TAU;

use crate::geometry::RadialBoundary;

/// Quadrature points for the area-based metrics.
pub const AREA_POINTS: usize = 10_000;
/// Angles sampled per curve for the Hausdorff distance.
pub const HAUSDORFF_POINTS: usize = 2000;

/// Composite trapezoid rule of a periodic integrand over `[0, 2 pi]`.
fn periodic_integral(f: impl Fn(f64) -> f64) -> f64 {
    let h = TAU / AREA_POINTS as f64;
    // The endpoints coincide, so the trapezoid weights are all equal.
    (0..AREA_POINTS).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

/// Area of the symmetric difference of the two enclosed regions.
pub fn lebesgue_error<A, B>(g1: &A, g2: &B) -> f64
where
    A: RadialBoundary + ?Sized,
    B: RadialBoundary + ?Sized,
{
    0.5 * periodic_integral(|w| (g1.radius(w).powi(2) - g2.radius(w).powi(2)).abs())
}

/// Area enclosed by a star-shaped curve.
pub fn area<B: RadialBoundary + ?Sized>(g: &B) -> f64 {
    0.5 * periodic_integral(|w| g.radius(w).powi(2))
}

/// One minus the Dice similarity coefficient of the two regions.
pub fn dsm_error<A, B>(g1: &A, g2: &B) -> f64
where
    A: RadialBoundary + ?Sized,
    B: RadialBoundary + ?Sized,
{
    let (mut inter, mut a1, mut a2) = (0.0, 0.0, 0.0);
    for i in 0..AREA_POINTS {
        let w = i as f64 * TAU / AREA_POINTS as f64;
        let (r1, r2) = (g1.radius(w), g2.radius(w));
        inter += r1.min(r2).powi(2);
        a1 += r1 * r1;
        a2 += r2 * r2;
    }
    if a1 + a2 == 0.0 {
        return 0.0;
    }
    (1.0 - 2.0 * inter / (a1 + a2)).max(0.0)
}

fn curve_points<B: RadialBoundary + ?Sized>(g: &B) -> Vec<(f64, f64)> {
    (0..HAUSDORFF_POINTS)
        .map(|i| {
            let w = i as f64 * TAU / HAUSDORFF_POINTS as f64;
            let r = g.radius(w);
            (r * w.cos(), r * w.sin())
        })
        .collect()
}

fn directed(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
    from.iter()
        .map(|p| {
            to.iter()
                .map(|q| (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        .sqrt()
}

/// Symmetric Hausdorff distance between the two curves.
pub fn hausdorff_error<A, B>(g1: &A, g2: &B) -> f64
where
    A: RadialBoundary + ?Sized,
    B: RadialBoundary + ?Sized,
{
    let (p1, p2) = (curve_points(g1), curve_points(g2));
    directed(&p1, &p2).max(directed(&p2, &p1))
}
