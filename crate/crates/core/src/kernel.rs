//! Squared-exponential periodic kernel on the circle and its Fourier–Bessel
//! eigen-decomposition.
//!
//! With `psi_1 = 1`, `psi_{2j} = sqrt(2) cos(2 pi j t)` and
//! `psi_{2j+1} = sqrt(2) sin(2 pi j t)`, the kernel
//! `G_a(t, t') = exp(-4 a^2 sin^2(pi (t - t')))` satisfies
//! `G_a = sum_k v_k(a) psi_k(t) psi_k(t')` with `v_1 = e^{-2a^2} I_0(2a^2)` and
//! `v_{2j} = v_{2j+1} = e^{-2a^2} I_j(2a^2)`.
//!
//! Indices in code are zero-based: entry `0` is the constant mode, entries
//! `2j - 1` and `2j` are the cosine and sine of frequency `j`.

use std::f64::consts::{PI, SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::geometry::RadialBoundary;
pub use crate::special::bessel_i_scaled;
use crate::special::bessel_i_scaled_seq;

/// Number of coefficients for truncation level `j`.
pub const fn basis_len(j: usize) -> usize {
    2 * j + 1
}

/// Eigenvalues `v_1..v_L` of `G_a` for `L = 2J + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    a: f64,
    j: usize,
    values: Vec<f64>,
}

impl EigenSpectrum {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `z^T diag(v)^{-1} z`.
    pub fn quadratic_form(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.values.len());
        z.iter().zip(&self.values).map(|(zk, vk)| zk * zk / vk).sum()
    }

    /// True when every eigenvalue is representable as a positive double.
    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }
}

/// Spectrum of `G_a` truncated at `L = 2J + 1` terms.
///
/// Computed from the scaled Bessel values at `2a^2`, so large `a` is safe.
pub fn eigenvalues(a: f64, j: usize) -> Result<EigenSpectrum> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid(format!("kernel scale a must be positive, got {a}")));
    }
    if j == 0 {
        return Err(Error::invalid("truncation J must be at least 1"));
    }
    let bessel = bessel_i_scaled_seq(j, 2.0 * a * a)?;
    let mut values = Vec::with_capacity(basis_len(j));
    values.push(bessel[0]);
    for &b in &bessel[1..] {
        values.push(b);
        values.push(b);
    }
    Ok(EigenSpectrum { a, j, values })
}

/// Orthonormal Fourier basis at `t` (reduced mod 1).
pub fn basis(t: f64, j: usize) -> Vec<f64> {
    let mut out = vec![0.0; basis_len(j)];
    basis_into(t, &mut out);
    out
}

/// Fills `out` (length `2J + 1`) with the basis at `t`.
pub fn basis_into(t: f64, out: &mut [f64]) {
    debug_assert!(out.len() % 2 == 1);
    let t = t.rem_euclid(1.0);
    out[0] = 1.0;
    for freq in 1..=out.len() / 2 {
        let (s, c) = (TAU * freq as f64 * t).sin_cos();
        out[2 * freq - 1] = SQRT_2 * c;
        out[2 * freq] = SQRT_2 * s;
    }
}

/// `G_a(t1, t2) = exp(-4 a^2 sin^2(pi t1 - pi t2))`.
pub fn kernel_value(a: f64, t1: f64, t2: f64) -> f64 {
    let s = (PI * (t1 - t2)).sin();
    (-4.0 * a * a * s * s).exp()
}

/// Angle in `[0, 2pi)` mapped to the kernel's index `t` in `[0, 1)`.
#[inline]
pub fn angle_to_t(omega: f64) -> f64 {
    (omega / TAU).rem_euclid(1.0)
}

/// Constant prior mean plus a truncated basis expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCoefficients {
    pub mu: f64,
    pub z: Vec<f64>,
}

impl BoundaryCoefficients {
    pub fn new(mu: f64, z: Vec<f64>) -> Result<Self> {
        if z.len() % 2 == 0 {
            return Err(Error::invalid(format!(
                "coefficient vector must have odd length 2J+1, got {}",
                z.len()
            )));
        }
        if !(mu > 0.0) {
            return Err(Error::invalid(format!("mean radius must be positive, got {mu}")));
        }
        Ok(Self { mu, z })
    }

    /// The circle of radius `mu` at truncation `j`.
    pub fn circle(mu: f64, j: usize) -> Result<Self> {
        Self::new(mu, vec![0.0; basis_len(j)])
    }

    pub fn j(&self) -> usize {
        self.z.len() / 2
    }

    /// `mu + sum_k z_k psi_k(omega / 2pi)`. May be nonpositive.
    pub fn eval(&self, omega: f64) -> f64 {
        boundary_eval(self, omega)
    }
}

pub fn boundary_eval(c: &BoundaryCoefficients, omega: f64) -> f64 {
    let t = angle_to_t(omega);
    let mut acc = c.mu + c.z[0];
    for freq in 1..=c.z.len() / 2 {
        let (s, co) = (TAU * freq as f64 * t).sin_cos();
        acc += SQRT_2 * (c.z[2 * freq - 1] * co + c.z[2 * freq] * s);
    }
    acc
}

impl RadialBoundary for BoundaryCoefficients {
    fn radius(&self, theta: f64) -> f64 {
        boundary_eval(self, theta)
    }
}
