//! Smooth compactly supported vector test functions with exact derivatives.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::jet::Jet;

/// Exponents below −700 are flushed to zero.
const CUT: f64 = 1.0 / 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Profile {
    /// exp(−1/(1−s)) with s = |y|².
    Bump,
    /// Equal to 1 for s ≤ inner, smooth step down to 0 at s = 1.
    Plateau { inner: f64 },
}

impl Profile {
    /// Profile value and first two derivatives in s.
    fn eval(&self, s: f64) -> (f64, f64, f64) {
        match *self {
            Profile::Bump => {
                let t = 1.0 - s;
                if t <= CUT {
                    return (0.0, 0.0, 0.0);
                }
                let g = (-1.0 / t).exp();
                let t2 = t * t;
                (g, -g / t2, g * (1.0 / (t2 * t2) - 2.0 / (t2 * t)))
            }
            Profile::Plateau { inner } => {
                let w = 1.0 - inner;
                let t = (1.0 - s) / w;
                let (f0, f1, f2) = smooth_step(t);
                (f0, -f1 / w, f2 / (w * w))
            }
        }
    }
}

/// C∞ step σ(t) = A/(A+B), A = e^{−1/t}, B = e^{−1/(1−t)}, with two derivatives.
fn smooth_step(t: f64) -> (f64, f64, f64) {
    if t <= CUT {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 - CUT {
        return (1.0, 0.0, 0.0);
    }
    let u = 1.0 - t;
    let a = (-1.0 / t).exp();
    let b = (-1.0 / u).exp();
    let a1 = a / (t * t);
    let a2 = a * (1.0 / t.powi(4) - 2.0 / t.powi(3));
    let b1 = -b / (u * u);
    let b2 = b * (1.0 / u.powi(4) - 2.0 / u.powi(3));
    let den = a + b;
    let d1 = a1 + b1;
    let d2 = a2 + b2;
    let s0 = a / den;
    let num1 = a1 * den - a * d1;
    let s1 = num1 / (den * den);
    let s2 = (a2 * den - a * d2) / (den * den) - 2.0 * d1 * num1 / den.powi(3);
    (s0, s1, s2)
}

/// profile(|y|²)·(c0 + c1·y + c2|y|²)·cos(ω·y + φ), y = (x − center)/radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summand {
    pub center: Vec<f64>,
    pub radius: f64,
    pub profile: Profile,
    pub c0: f64,
    pub c1: Vec<f64>,
    pub c2: f64,
    pub freq: Vec<f64>,
    pub phase: f64,
}

impl Summand {
    fn jet(&self, x: &[f64]) -> Jet {
        let d = x.len();
        let dist2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        if dist2 >= self.radius * self.radius {
            return Jet::zero(d);
        }
        let ys: Vec<Jet> = (0..d).map(|i| Jet::coordinate(x, i, self.center[i], self.radius)).collect();
        let mut s = Jet::zero(d);
        for y in &ys {
            s.add_assign(&y.mul(y));
        }
        let (g0, g1, g2) = self.profile.eval(s.value);
        if g0 == 0.0 && g1 == 0.0 && g2 == 0.0 {
            return Jet::zero(d);
        }
        let prof = s.compose(g0, g1, g2);

        let mut poly = Jet::constant(d, self.c0);
        let mut arg = Jet::constant(d, self.phase);
        for (i, y) in ys.iter().enumerate() {
            poly.add_scaled(y, self.c1[i]);
            arg.add_scaled(y, self.freq[i]);
        }
        poly.add_scaled(&s, self.c2);
        let (c, sn) = (arg.value.cos(), arg.value.sin());
        let trig = arg.compose(c, -sn, -c);
        prof.mul(&poly).mul(&trig)
    }

    fn scale_coefficients(&mut self, c: f64) {
        self.c0 *= c;
        self.c2 *= c;
        self.c1.iter_mut().for_each(|t| *t *= c);
    }
}

/// A real ℝᵈ → ℝᵐ test function; every component is a finite sum of summands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    pub d: usize,
    pub m: usize,
    pub support_radius: f64,
    pub components: Vec<Vec<Summand>>,
}

impl TestFunction {
    pub fn zero(d: usize, m: usize, support_radius: f64) -> Self {
        TestFunction { d, m, support_radius, components: vec![Vec::new(); m] }
    }

    /// Value, gradient and Hessian of each component at x.
    pub fn jets(&self, x: &[f64]) -> Vec<Jet> {
        self.components
            .iter()
            .map(|sums| {
                let mut acc = Jet::zero(self.d);
                for s in sums {
                    acc.add_assign(&s.jet(x));
                }
                acc
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.jets(x).into_iter().map(|j| j.value).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for s in out.components.iter_mut().flatten() {
            s.scale_coefficients(c);
        }
        out
    }

    /// x ↦ u(x/s).
    pub fn dilated(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.support_radius *= s;
        for sm in out.components.iter_mut().flatten() {
            sm.radius *= s;
            sm.center.iter_mut().for_each(|c| *c *= s);
        }
        out
    }
}

/// Real and imaginary parts of a ℂᵐ-valued test function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexTestFunction {
    pub re: TestFunction,
    pub im: TestFunction,
}

impl ComplexTestFunction {
    pub fn support_radius(&self) -> f64 {
        self.re.support_radius.max(self.im.support_radius)
    }

    pub fn scaled(&self, c: f64) -> Self {
        ComplexTestFunction { re: self.re.scaled(c), im: self.im.scaled(c) }
    }
}

impl From<TestFunction> for ComplexTestFunction {
    fn from(re: TestFunction) -> Self {
        let im = TestFunction::zero(re.d, re.m, re.support_radius);
        ComplexTestFunction { re, im }
    }
}

/// Random test function with `richness` summands per component, supported in the ball of radius R.
///
/// The first summand of every component is a plain polynomial times the bump centred at the
/// origin with radius R; the rest are off-centre, smaller and carry a trigonometric factor.
pub fn make_bump(seed: u64, d: usize, m: usize, radius: f64, richness: usize) -> TestFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TestFunction::zero(d, m, radius);
    for comp in out.components.iter_mut() {
        for k in 0..richness {
            let (center, r, freq, phase) = if k == 0 {
                (vec![0.0; d], radius, vec![0.0; d], 0.0)
            } else {
                let dir: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = dir.iter().map(|t| t * t).sum::<f64>().sqrt().max(1e-12);
                let off = rng.random_range(0.0..0.3) * radius;
                let center: Vec<f64> = dir.iter().map(|t| t / n * off).collect();
                let r = (radius - off) * rng.random_range(0.7..1.0);
                let freq = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
                (center, r, freq, rng.random_range(0.0..2.0 * PI))
            };
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            comp.push(Summand {
                center,
                radius: r,
                profile: Profile::Bump,
                c0: sign * rng.random_range(0.5..1.5),
                c1: (0..d).map(|_| rng.random_range(-1.0..1.0)).collect(),
                c2: rng.random_range(-0.5..0.5),
                freq,
                phase,
            });
        }
    }
    out
}

/// Complex test function with independent real and imaginary parts.
pub fn make_complex_bump(seed: u64, d: usize, m: usize, radius: f64, richness: usize) -> ComplexTestFunction {
    ComplexTestFunction {
        re: make_bump(seed.wrapping_mul(2), d, m, radius, richness),
        im: make_bump(seed.wrapping_mul(2).wrapping_add(1), d, m, radius, richness),
    }
}

/// Component h equals `levels[h]` on the ball of radius √inner·R and vanishes outside radius R.
pub fn make_plateau(d: usize, radius: f64, inner: f64, levels: &[f64]) -> TestFunction {
    let mut out = TestFunction::zero(d, levels.len(), radius);
    for (comp, &c0) in out.components.iter_mut().zip(levels) {
        comp.push(Summand {
            center: vec![0.0; d],
            radius,
            profile: Profile::Plateau { inner },
            c0,
            c1: vec![0.0; d],
            c2: 0.0,
            freq: vec![0.0; d],
            phase: 0.0,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_derivatives_match_differences() {
        let h = 1e-5;
        for t in [0.2, 0.5, 0.77] {
            let (_, d1, d2) = smooth_step(t);
            let (p, _, _) = smooth_step(t + h);
            let (mm, _, _) = smooth_step(t - h);
            let (c, _, _) = smooth_step(t);
            assert!((d1 - (p - mm) / (2.0 * h)).abs() < 1e-7);
            assert!((d2 - (p - 2.0 * c + mm) / (h * h)).abs() < 1e-3);
        }
    }

    #[test]
    fn dilation_moves_support() {
        let u = make_bump(3, 1, 1, 1.0, 3);
        let v = u.dilated(2.0);
        assert_eq!(v.eval(&[1.4])[0], u.eval(&[0.7])[0]);
    }
}
