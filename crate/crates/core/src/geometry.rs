//! Polar coordinates about a reference point and reference boundary curves.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

/// Known interior point about which the boundary is star-shaped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    pub x: f64,
    pub y: f64,
}

impl ReferencePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::invalid(format!(
                "reference point ({x}, {y}) lies outside the unit square"
            )));
        }
        Ok(Self { x, y })
    }

    pub const fn image_center() -> Self {
        Self { x: 0.5, y: 0.5 }
    }

    pub fn to_rect(&self, p: PolarPoint) -> (f64, f64) {
        let (s, c) = p.theta.sin_cos();
        (self.x + p.r * c, self.y + p.r * s)
    }
}

/// Normalises an angle into `[0, 2pi)`.
#[inline]
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2pi for tiny negative inputs.
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[inline]
pub fn to_polar(x: f64, y: f64, center: ReferencePoint) -> PolarPoint {
    let dx = x - center.x;
    let dy = y - center.y;
    PolarPoint {
        r: dx.hypot(dy),
        theta: normalize_angle(dy.atan2(dx)),
    }
}

/// `n` equally spaced angles `2 pi i / n` covering `[0, 2pi)`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

pub fn rect_to_polar(points: &[(f64, f64)], center: ReferencePoint) -> Vec<PolarPoint> {
    points.iter().map(|&(x, y)| to_polar(x, y, center)).collect()
}

/// A closed curve given as its radius in each direction from the reference
/// point.
pub trait RadialBoundary {
    fn radius(&self, theta: f64) -> f64;
}

impl<T: RadialBoundary + ?Sized> RadialBoundary for &T {
    fn radius(&self, theta: f64) -> f64 {
        (**self).radius(theta)
    }
}

impl<T: RadialBoundary + ?Sized> RadialBoundary for Box<T> {
    fn radius(&self, theta: f64) -> f64 {
        (**self).radius(theta)
    }
}

/// Strict containment; points on the curve count as outside.
#[inline]
pub fn inside<B: RadialBoundary + ?Sized>(boundary: &B, p: PolarPoint) -> bool {
    p.r < boundary.radius(p.theta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub radius: f64,
}

impl Circle {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Self { radius })
    }
}

impl RadialBoundary for Circle {
    fn radius(&self, _theta: f64) -> f64 {
        self.radius
    }
}

/// Rotated ellipse whose center sits at `offset` from the reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    semi_a: f64,
    semi_b: f64,
    rotation: f64,
    offset: (f64, f64),
    // Reference point expressed in the ellipse's own frame.
    local_ref: (f64, f64),
    cos_rot: f64,
    sin_rot: f64,
}

impl Ellipse {
    pub fn new(semi_a: f64, semi_b: f64, rotation: f64, offset: (f64, f64)) -> Result<Self> {
        if !(semi_a > 0.0) || !(semi_b > 0.0) {
            return Err(Error::invalid(format!(
                "ellipse semi-axes must be positive, got {semi_a}, {semi_b}"
            )));
        }
        let (sin_rot, cos_rot) = rotation.sin_cos();
        let (dx, dy) = (-offset.0, -offset.1);
        let local_ref = (cos_rot * dx + sin_rot * dy, -sin_rot * dx + cos_rot * dy);
        let level = (local_ref.0 / semi_a).powi(2) + (local_ref.1 / semi_b).powi(2);
        if level >= 1.0 {
            return Err(Error::CenterOutsideEllipse {
                dx: offset.0,
                dy: offset.1,
            });
        }
        Ok(Self {
            semi_a,
            semi_b,
            rotation,
            offset,
            local_ref,
            cos_rot,
            sin_rot,
        })
    }

    /// Axis-aligned ellipse centred on the reference point.
    pub fn centered(semi_a: f64, semi_b: f64) -> Result<Self> {
        Self::new(semi_a, semi_b, 0.0, (0.0, 0.0))
    }

    pub fn semi_axes(&self) -> (f64, f64) {
        (self.semi_a, self.semi_b)
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn offset(&self) -> (f64, f64) {
        self.offset
    }
}

impl RadialBoundary for Ellipse {
    fn radius(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let ux = self.cos_rot * c + self.sin_rot * s;
        let uy = -self.sin_rot * c + self.cos_rot * s;
        let (px, py) = self.local_ref;
        let ia2 = 1.0 / (self.semi_a * self.semi_a);
        let ib2 = 1.0 / (self.semi_b * self.semi_b);
        let qa = ux * ux * ia2 + uy * uy * ib2;
        let qb = 2.0 * (px * ux * ia2 + py * uy * ib2);
        let qc = px * px * ia2 + py * py * ib2 - 1.0;
        // qc < 0, so the roots have opposite signs; pick the positive one
        // without cancellation.
        let disc = (qb * qb - 4.0 * qa * qc).sqrt();
        if qb >= 0.0 {
            2.0 * qc / (-qb - disc)
        } else {
            (-qb + disc) / (2.0 * qa)
        }
    }
}

/// Equilateral triangle with its centroid on the reference point and one
/// vertex straight up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    height: f64,
}

/// Outward edge normals: the edge opposite the top vertex faces down.
const TRIANGLE_NORMALS: [f64; 3] = [PI / 6.0, 5.0 * PI / 6.0, 3.0 * FRAC_PI_2];

impl Triangle {
    pub fn new(height: f64) -> Result<Self> {
        if !(height > 0.0) {
            return Err(Error::invalid(format!("triangle height must be positive, got {height}")));
        }
        Ok(Self { height })
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn vertices(&self, center: ReferencePoint) -> [(f64, f64); 3] {
        let r = 2.0 * self.height / 3.0;
        let at = |angle: f64| (center.x + r * angle.cos(), center.y + r * angle.sin());
        [
            at(FRAC_PI_2),
            at(FRAC_PI_2 + TAU / 3.0),
            at(FRAC_PI_2 + 2.0 * TAU / 3.0),
        ]
    }
}

impl RadialBoundary for Triangle {
    fn radius(&self, theta: f64) -> f64 {
        let inradius = self.height / 3.0;
        let best = TRIANGLE_NORMALS
            .iter()
            .map(|n| (theta - n).cos())
            .fold(f64::NEG_INFINITY, f64::max);
        inradius / best
    }
}

/// Closed curve sampled on an equally spaced angle grid, linearly interpolated
/// with periodic wrap.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    radii: Vec<f64>,
}

impl SampledCurve {
    /// `radii[i]` is the radius at angle `2 pi i / radii.len()`.
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 3 {
            return Err(Error::invalid("sampled curve needs at least 3 points"));
        }
        if let Some(bad) = radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::invalid(format!("sampled curve has nonpositive radius {bad}")));
        }
        Ok(Self { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// Periodic linear interpolation of values on the grid `2 pi i / n`.
pub fn interpolate_periodic(values: &[f64], theta: f64) -> f64 {
    let n = values.len();
    let pos = normalize_angle(theta) / TAU * n as f64;
    let i0 = (pos.floor() as usize).min(n - 1);
    let frac = pos - i0 as f64;
    let i1 = (i0 + 1) % n;
    values[i0] * (1.0 - frac) + values[i1] * frac
}

impl RadialBoundary for SampledCurve {
    fn radius(&self, theta: f64) -> f64 {
        interpolate_periodic(&self.radii, theta)
    }
}

/// Named reference shapes, convenient for configuration and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Circle(Circle),
    Ellipse(Ellipse),
    Triangle(Triangle),
}

impl RadialBoundary for Shape {
    fn radius(&self, theta: f64) -> f64 {
        match self {
            Shape::Circle(c) => c.radius(theta),
            Shape::Ellipse(e) => e.radius(theta),
            Shape::Triangle(t) => t.radius(theta),
        }
    }
}

pub fn ellipse_boundary(
    semi_axis_a: f64,
    semi_axis_b: f64,
    rotation: f64,
    offset: (f64, f64),
) -> Result<Ellipse> {
    Ellipse::new(semi_axis_a, semi_axis_b, rotation, offset)
}

pub fn triangle_boundary(height: f64) -> Result<Triangle> {
    Triangle::new(height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const C: ReferencePoint = ReferencePoint::image_center();

    #[test]
    fn polar_axis_cases() {
        let p = rect_to_polar(&[(0.7, 0.5), (0.5, 0.5), (0.5, 0.8)], C);
        assert!((p[0].r - 0.2).abs() < 1e-15 && p[0].theta == 0.0);
        assert_eq!(p[1], PolarPoint { r: 0.0, theta: 0.0 });
        assert!((p[2].r - 0.3).abs() < 1e-15);
        assert!((p[2].theta - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn angles_land_in_half_open_range() {
        let p = to_polar(0.5 + 1.0, 0.5 - 1e-300, C);
        assert!(p.theta >= 0.0 && p.theta < TAU);
        assert_eq!(normalize_angle(-1e-18), 0.0);
    }

    #[test]
    fn ellipse_axis_directions() {
        let e = Ellipse::centered(0.35, 0.25).unwrap();
        assert!((e.radius(0.0) - 0.35).abs() < 1e-15);
        assert!((e.radius(FRAC_PI_2) - 0.25).abs() < 1e-15);
        assert!((e.radius(PI) - 0.35).abs() < 1e-15);
    }

    /// Bisection on the implicit conic along the ray.
    fn ellipse_bisection(a: f64, b: f64, rot: f64, off: (f64, f64), omega: f64) -> f64 {
        let level = |t: f64| {
            let x = t * omega.cos() - off.0;
            let y = t * omega.sin() - off.1;
            let xr = x * rot.cos() + y * rot.sin();
            let yr = -x * rot.sin() + y * rot.cos();
            (xr / a).powi(2) + (yr / b).powi(2) - 1.0
        };
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if level(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn rotated_offset_ellipse_matches_bisection() {
        let rot = PI / 3.0;
        let e = Ellipse::new(0.35, 0.25, rot, (0.1, 0.1)).unwrap();
        for k in 0..64 {
            let omega = TAU * k as f64 / 64.0;
            let oracle = ellipse_bisection(0.35, 0.25, rot, (0.1, 0.1), omega);
            assert!((e.radius(omega) - oracle).abs() < 1e-12, "omega={omega}");
        }
        let at0 = ellipse_bisection(0.35, 0.25, rot, (0.1, 0.1), 0.0);
        assert!((e.radius(0.0) - at0).abs() < 1e-12);
    }

    #[test]
    fn ellipse_rejects_exterior_reference() {
        assert!(matches!(
            Ellipse::new(0.1, 0.1, 0.0, (0.2, 0.0)),
            Err(Error::CenterOutsideEllipse { .. })
        ));
        assert!(Ellipse::new(0.0, 0.1, 0.0, (0.0, 0.0)).is_err());
    }

    #[test]
    fn triangle_vertex_and_edge() {
        let t = Triangle::new(0.5).unwrap();
        assert!((t.radius(FRAC_PI_2) - 1.0 / 3.0).abs() < 1e-15);
        assert!((t.radius(3.0 * FRAC_PI_2) - 0.5 / 3.0).abs() < 1e-15);
    }

    /// Ray against each segment of the polygon; nearest positive hit.
    fn polygon_ray(vertices: &[(f64, f64)], origin: (f64, f64), omega: f64) -> f64 {
        let (dx, dy) = (omega.cos(), omega.sin());
        let mut best = f64::INFINITY;
        for i in 0..vertices.len() {
            let (ax, ay) = vertices[i];
            let (bx, by) = vertices[(i + 1) % vertices.len()];
            let (ex, ey) = (bx - ax, by - ay);
            let det = dx * (-ey) - dy * (-ex);
            if det.abs() < 1e-15 {
                continue;
            }
            let (rx, ry) = (ax - origin.0, ay - origin.1);
            let t = (rx * (-ey) - ry * (-ex)) / det;
            let s = (dx * ry - dy * rx) / det;
            if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
                best = best.min(t);
            }
        }
        best
    }

    #[test]
    fn triangle_matches_ray_casting() {
        let t = Triangle::new(0.5).unwrap();
        let verts = t.vertices(C);
        for k in 0..360 {
            let omega = TAU * k as f64 / 360.0;
            let oracle = polygon_ray(&verts, (C.x, C.y), omega);
            assert!((t.radius(omega) - oracle).abs() < 1e-12, "omega={omega}");
        }
    }

    fn point_in_polygon(vertices: &[(f64, f64)], p: (f64, f64)) -> bool {
        let mut inside = false;
        let n = vertices.len();
        for i in 0..n {
            let (xi, yi) = vertices[i];
            let (xj, yj) = vertices[(i + n - 1) % n];
            if (yi > p.1) != (yj > p.1) && p.0 < (xj - xi) * (p.1 - yi) / (yj - yi) + xi {
                inside = !inside;
            }
        }
        inside
    }

    #[test]
    fn containment_cases() {
        let circle = Circle::new(0.3).unwrap();
        assert!(inside(&circle, PolarPoint { r: 0.2, theta: 1.0 }));
        assert!(!inside(&circle, PolarPoint { r: 0.3, theta: 1.0 }));

        let tri = Triangle::new(0.5).unwrap();
        let verts = tri.vertices(C);
        let p = PolarPoint { r: 0.2, theta: FRAC_PI_2 };
        assert!(inside(&tri, p));
        assert_eq!(inside(&tri, p), point_in_polygon(&verts, C.to_rect(p)));
        for k in 0..500 {
            let theta = TAU * (k as f64 * 0.618_033_988_7).fract();
            let r = 0.4 * ((k * 37 % 101) as f64 / 101.0);
            let p = PolarPoint { r, theta };
            if (r - tri.radius(theta)).abs() > 1e-9 {
                assert_eq!(inside(&tri, p), point_in_polygon(&verts, C.to_rect(p)));
            }
        }
    }

    #[test]
    fn sampled_curve_interpolates() {
        let c = SampledCurve::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(c.radius(0.0), 1.0);
        assert!((c.radius(PI / 4.0) - 1.5).abs() < 1e-15);
        assert!((c.radius(7.0 * PI / 4.0) - 2.5).abs() < 1e-15);
        assert!(SampledCurve::new(vec![1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn constructors_positive_on_dense_grid() {
        let shapes = [
            Shape::Circle(Circle::new(0.3).unwrap()),
            Shape::Ellipse(Ellipse::new(0.35, 0.25, PI / 3.0, (0.1, 0.1)).unwrap()),
            Shape::Triangle(Triangle::new(0.5).unwrap()),
        ];
        for s in &shapes {
            for k in 0..10_000 {
                assert!(s.radius(TAU * k as f64 / 10_000.0) > 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn polar_round_trip(r in 1e-3f64..1.0, theta in 0.0f64..TAU) {
            let (x, y) = C.to_rect(PolarPoint { r, theta });
            let p = to_polar(x, y, C);
            prop_assert!((p.r - r).abs() < 1e-12);
            let dtheta = (p.theta - theta).abs();
            prop_assert!(dtheta.min(TAU - dtheta) < 1e-12);
        }

        #[test]
        fn centered_ellipse_identity(a in 0.05f64..0.5, b in 0.05f64..0.5, w in 0.0f64..TAU) {
            let e = Ellipse::centered(a, b).unwrap();
            let lhs = e.radius(w) * ((b * w.cos()).powi(2) + (a * w.sin()).powi(2)).sqrt();
            prop_assert!((lhs - a * b).abs() < 1e-10);
        }

        #[test]
        fn triangle_rotational_symmetry(h in 0.1f64..1.0, w in 0.0f64..TAU) {
            let t = Triangle::new(h).unwrap();
            prop_assert!((t.radius(w) - t.radius(w + TAU / 3.0)).abs() < 1e-12);
        }
    }
}
