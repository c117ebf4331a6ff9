//! Deterministic sample sets in a ball of radius R.
//!
//! Point k is generated from its own ChaCha stream (seed, k), so the sample set for N
//! points is a prefix of the set for any larger N and evaluation order does not matter.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSpec {
    pub points: usize,
    pub radius: f64,
    pub seed: u64,
    /// Random unit directions per point (coordinate axes are always added).
    pub directions: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { points: 4000, radius: 10.0, seed: 7, directions: 16 }
    }
}

#[derive(Debug, Clone)]
pub struct SamplePoint {
    pub index: usize,
    pub x: Vec<f64>,
    /// Unit vectors in ℝ^d.
    pub etas: Vec<DVector<f64>>,
    /// Offsets in the closed unit ball of ℝ^d (for neighborhood sweeps).
    pub inner: Vec<Vec<f64>>,
}

pub(crate) const INNER_SAMPLES: usize = 8;

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    loop {
        let v: DVector<f64> = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

impl SampleSpec {
    /// The k-th sample in dimension d. Index 0 is the origin; odd indices are uniform in the
    /// ball, even indices concentrate exponentially toward the sphere |x| = R.
    pub fn point(&self, k: usize, d: usize) -> SamplePoint {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        let dir = unit_vector(&mut rng, d);
        let r = if k == 0 {
            0.0
        } else if k % 2 == 1 {
            self.radius * rng.random::<f64>().powf(1.0 / d as f64)
        } else {
            let e: f64 = Exp1.sample(&mut rng);
            (self.radius * (1.0 - e / 10.0)).max(0.0)
        };
        let x: Vec<f64> = dir.iter().map(|c| c * r).collect();
        let mut etas: Vec<DVector<f64>> = (0..d)
            .map(|i| DVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        if d > 1 {
            for _ in 0..self.directions {
                etas.push(unit_vector(&mut rng, d));
            }
        }
        let inner = (0..INNER_SAMPLES)
            .map(|_| {
                let u = unit_vector(&mut rng, d);
                let s = rng.random::<f64>().powf(1.0 / d as f64);
                u.iter().map(|c| c * s).collect()
            })
            .collect();
        SamplePoint { index: k, x, etas, inner }
    }
}

/// Result of a max-reduction over the sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMax {
    pub value: f64,
    pub point: Vec<f64>,
    /// Samples whose evaluation was non-finite or degenerate.
    pub skipped: usize,
}

/// Maximum of `f` over the sample set; `None` or non-finite values are skipped.
/// Ties go to the lowest index, so the result does not depend on scheduling.
pub fn sweep_max<F>(spec: &SampleSpec, d: usize, f: F) -> SweepMax
where
    F: Fn(&SamplePoint) -> Option<f64> + Sync,
{
    let (best, skipped) = (0..spec.points)
        .into_par_iter()
        .map(|k| {
            let sp = spec.point(k, d);
            match f(&sp) {
                Some(v) if v.is_finite() => (Some((v, k)), 0usize),
                _ => (None, 1usize),
            }
        })
        .reduce(
            || (None, 0),
            |(a, sa), (b, sb)| {
                let best = match (a, b) {
                    (Some(a), Some(b)) => Some(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
                    (x, None) | (None, x) => x,
                };
                (best, sa + sb)
            },
        );
    match best {
        Some((v, k)) => SweepMax { value: v, point: spec.point(k, d).x, skipped },
        None => SweepMax { value: f64::NAN, point: vec![], skipped },
    }
}

/// Minimum counterpart of [`sweep_max`].
pub fn sweep_min<F>(spec: &SampleSpec, d: usize, f: F) -> SweepMax
where
    F: Fn(&SamplePoint) -> Option<f64> + Sync,
{
    let mut r = sweep_max(spec, d, |sp| f(sp).map(|v| -v));
    r.value = -r.value;
    r
}
