//! Tensor trapezoid quadrature on [−L, L]ᵈ.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureGrid {
    pub d: usize,
    pub half_width: f64,
    pub n: usize,
    pub h: f64,
}

impl QuadratureGrid {
    pub fn new(d: usize, half_width: f64, n: usize) -> Result<Self> {
        if d == 0 || d > 3 {
            return Err(Error::InvalidParameters(format!("quadrature dimension d = {d} must be 1, 2 or 3")));
        }
        if n < 3 || !(half_width > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "quadrature grid needs n >= 3 and L > 0 (got n = {n}, L = {half_width})"
            )));
        }
        Ok(QuadratureGrid { d, half_width, n, h: 2.0 * half_width / (n - 1) as f64 })
    }

    /// Box exactly covering the ball of the given radius.
    pub fn covering(d: usize, radius: f64, n: usize) -> Result<Self> {
        Self::new(d, radius, n)
    }

    pub fn require_support(&self, radius: f64) -> Result<()> {
        if radius > self.half_width * (1.0 + 1e-12) {
            return Err(Error::SupportExceedsGrid(format!(
                "support radius {radius} exceeds quadrature half-width {}",
                self.half_width
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn fill(&self, mut idx: usize, x: &mut [f64]) -> f64 {
        let mut w = 1.0;
        for xi in x.iter_mut() {
            let k = idx % self.n;
            idx /= self.n;
            *xi = -self.half_width + k as f64 * self.h;
            w *= if k == 0 || k == self.n - 1 { 0.5 * self.h } else { self.h };
        }
        w
    }

    pub fn point(&self, idx: usize) -> (Vec<f64>, f64) {
        let mut x = vec![0.0; self.d];
        let w = self.fill(idx, &mut x);
        (x, w)
    }

    /// Σ wₖ f(xₖ) for k integrands at once. Partial sums are formed over fixed chunks and added in
    /// chunk order, so the result does not depend on the thread count.
    pub fn integrate_many<F>(&self, k: usize, f: F) -> Vec<f64>
    where
        F: Fn(&[f64], &mut [f64]) + Sync,
    {
        let total = self.len();
        let chunks = total.div_ceil(CHUNK);
        let partials: Vec<Vec<f64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![0.0; k];
                let mut x = vec![0.0; self.d];
                let mut vals = vec![0.0; k];
                for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    let w = self.fill(idx, &mut x);
                    vals.iter_mut().for_each(|v| *v = 0.0);
                    f(&x, &mut vals);
                    for (a, v) in acc.iter_mut().zip(&vals) {
                        *a += w * v;
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![0.0; k];
        for p in partials {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        out
    }

    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        self.integrate_many(1, |x, out| out[0] = f(x))[0]
    }

    /// Minimum of f over the nodes (lowest index on ties).
    pub fn min_over<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|idx| f(&self.point(idx).0))
            .reduce(|| f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_on_square() {
        let g = QuadratureGrid::new(2, 1.0, 201).unwrap();
        let v = g.integrate(|x| x[0] * x[0] + 1.0);
        // ∫∫ (x² + 1) = 16/3
        assert!((v - 16.0 / 3.0).abs() < 1e-3);
    }
}
