//! Per-pixel boundary radii kept in step with single-coefficient moves.
//!
//! A move of coefficient `k` by `delta` changes every radius by
//! `delta * psi_k(theta_i)`, so a trial region split costs one pass over the
//! unmasked pixels with no trigonometry.

use crate::geometry::angle_grid;
use crate::kernel::{angle_to_t, basis_into, basis_len, BoundaryCoefficients};
use crate::model::{BinaryStats, GaussianStats, PolarObservation, GRID_SIZE};

/// Below this many pixels a parallel reduction is not worth the overhead.
#[cfg(feature = "parallel")]
const PAR_MIN_PIXELS: usize = 16_384;
#[cfg(feature = "parallel")]
const PAR_CHUNK: usize = 4096;

pub(crate) struct PixelCache {
    r: Vec<f64>,
    y: Vec<f64>,
    ones: Vec<u8>,
    /// `basis[k][i] = psi_k(theta_i)`, one contiguous column per coefficient.
    basis: Vec<Vec<f64>>,
    radius: Vec<f64>,
    grid_basis: Vec<Vec<f64>>,
    grid_radius: Vec<f64>,
    total_sum: f64,
    total_sumsq: f64,
    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    parallel: bool,
}

fn columns(thetas: impl Iterator<Item = f64>, l: usize, n: usize) -> Vec<Vec<f64>> {
    let mut cols = vec![Vec::with_capacity(n); l];
    let mut row = vec![0.0; l];
    for theta in thetas {
        basis_into(angle_to_t(theta), &mut row);
        for (col, v) in cols.iter_mut().zip(&row) {
            col.push(*v);
        }
    }
    cols
}

impl PixelCache {
    pub fn new(obs: &PolarObservation, c: &BoundaryCoefficients, parallel: bool) -> Self {
        let idx: Vec<usize> = obs.active_indices().collect();
        let l = basis_len(c.j());
        let y: Vec<f64> = idx.iter().map(|&i| obs.intensity()[i]).collect();
        let mut cache = Self {
            r: idx.iter().map(|&i| obs.r()[i]).collect(),
            ones: y.iter().map(|&v| (v == 1.0) as u8).collect(),
            total_sum: y.iter().sum(),
            total_sumsq: y.iter().map(|v| v * v).sum(),
            y,
            basis: columns(idx.iter().map(|&i| obs.theta()[i]), l, idx.len()),
            radius: Vec::new(),
            grid_basis: columns(angle_grid(GRID_SIZE).into_iter(), l, GRID_SIZE),
            grid_radius: Vec::new(),
            parallel: parallel && cfg!(feature = "parallel"),
        };
        cache.rebuild(c);
        cache
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    /// Recomputes all radii from scratch, discarding accumulated rounding.
    pub fn rebuild(&mut self, c: &BoundaryCoefficients) {
        fn expand(basis: &[Vec<f64>], c: &BoundaryCoefficients) -> Vec<f64> {
            let n = basis[0].len();
            let mut out = vec![c.mu; n];
            for (col, zk) in basis.iter().zip(&c.z) {
                for (o, b) in out.iter_mut().zip(col) {
                    *o += zk * b;
                }
            }
            out
        }
        self.radius = expand(&self.basis, c);
        self.grid_radius = expand(&self.grid_basis, c);
    }

    #[cfg(test)]
    pub fn grid_radius(&self) -> &[f64] {
        &self.grid_radius
    }

    /// Whether the curve stays positive on the check grid after the move.
    pub fn grid_valid_shifted(&self, k: usize, delta: f64) -> bool {
        self.grid_radius
            .iter()
            .zip(&self.grid_basis[k])
            .all(|(g, b)| g + delta * b > 0.0)
    }

    pub fn apply(&mut self, k: usize, delta: f64) {
        for (g, b) in self.radius.iter_mut().zip(&self.basis[k]) {
            *g += delta * b;
        }
        for (g, b) in self.grid_radius.iter_mut().zip(&self.grid_basis[k]) {
            *g += delta * b;
        }
    }

    /// Region counts after moving coefficient `k` by `delta`.
    pub fn binary_stats_shifted(&self, k: usize, delta: f64) -> BinaryStats {
        let col = &self.basis[k];
        let kernel = |lo: usize, hi: usize| {
            let mut n1 = 0usize;
            let mut ones1 = 0usize;
            for i in lo..hi {
                let inside = (self.r[i] < self.radius[i] + delta * col[i]) as usize;
                n1 += inside;
                ones1 += inside & self.ones[i] as usize;
            }
            (n1, ones1)
        };
        let (n1, ones1) = self.reduce(kernel, |a, b| (a.0 + b.0, a.1 + b.1));
        let total_ones = self.ones.iter().map(|&o| o as usize).sum::<usize>();
        BinaryStats {
            n1,
            ones1,
            n2: self.len() - n1,
            ones2: total_ones - ones1,
        }
    }

    /// Region sums after moving coefficient `k` by `delta`.
    pub fn gaussian_stats_shifted(&self, k: usize, delta: f64) -> GaussianStats {
        let col = &self.basis[k];
        let kernel = |lo: usize, hi: usize| {
            let mut n1 = 0usize;
            let mut s = 0.0;
            let mut ss = 0.0;
            for i in lo..hi {
                if self.r[i] < self.radius[i] + delta * col[i] {
                    let y = self.y[i];
                    n1 += 1;
                    s += y;
                    ss += y * y;
                }
            }
            (n1, s, ss)
        };
        let (n1, sum1, sumsq1) = self.reduce(kernel, |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        GaussianStats {
            n1,
            sum1,
            sumsq1,
            n2: self.len() - n1,
            sum2: self.total_sum - sum1,
            sumsq2: self.total_sumsq - sumsq1,
        }
    }

    #[cfg(feature = "parallel")]
    fn reduce<T, K, C>(&self, kernel: K, combine: C) -> T
    where
        T: Send,
        K: Fn(usize, usize) -> T + Sync,
        C: Fn(T, T) -> T + Sync,
    {
        use rayon::prelude::*;
        let n = self.len();
        if !self.parallel || n < PAR_MIN_PIXELS {
            return kernel(0, n);
        }
        let chunks = n.div_ceil(PAR_CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| kernel(c * PAR_CHUNK, ((c + 1) * PAR_CHUNK).min(n)))
            .reduce_with(&combine)
            .unwrap_or_else(|| kernel(0, 0))
    }

    #[cfg(not(feature = "parallel"))]
    fn reduce<T, K, C>(&self, kernel: K, _combine: C) -> T
    where
        K: Fn(usize, usize) -> T,
        C: Fn(T, T) -> T,
    {
        kernel(0, self.len())
    }
}
