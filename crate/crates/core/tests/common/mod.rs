#![allow(dead_code)]
//! A closure-built coefficient field for tests that need shapes the builtin families lack.

use lpgen_core::fields::{CoefficientField, ScalarJet};
use nalgebra::{DMatrix, DVector};

type MatFn = Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
type MatsFn = Box<dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync>;
type ScalFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VecFn = Box<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
type JetFn = Box<dyn Fn(&[f64]) -> ScalarJet + Send + Sync>;

pub struct ClosureField {
    pub d: usize,
    pub m: usize,
    pub q: MatFn,
    pub grad_q: MatsFn,
    pub b: MatsFn,
    pub div_b: MatFn,
    pub vpot: MatFn,
    pub v: ScalFn,
    pub grad_v: VecFn,
    pub hess_v: Option<MatFn>,
    pub psi: Option<JetFn>,
    pub phi: Option<JetFn>,
}

impl ClosureField {
    /// Q = I, B = 0, V = v = 1, ψ = φ = 1+|x|².
    pub fn unit(d: usize, m: usize) -> Self {
        ClosureField {
            d,
            m,
            q: Box::new(move |_| DMatrix::identity(d, d)),
            grad_q: Box::new(move |_| vec![DMatrix::zeros(d, d); d]),
            b: Box::new(move |_| vec![DMatrix::zeros(m, m); d]),
            div_b: Box::new(move |_| DMatrix::zeros(m, m)),
            vpot: Box::new(move |_| DMatrix::identity(m, m)),
            v: Box::new(|_| 1.0),
            grad_v: Box::new(move |_| DVector::zeros(d)),
            hess_v: Some(Box::new(move |_| DMatrix::zeros(d, d))),
            psi: Some(Box::new(quad)),
            phi: Some(Box::new(quad)),
        }
    }
}

pub fn quad(x: &[f64]) -> ScalarJet {
    let d = x.len();
    ScalarJet {
        value: 1.0 + x.iter().map(|t| t * t).sum::<f64>(),
        grad: DVector::from_iterator(d, x.iter().map(|t| 2.0 * t)),
        hess: Some(DMatrix::identity(d, d) * 2.0),
    }
}

impl CoefficientField for ClosureField {
    fn dim(&self) -> usize {
        self.d
    }
    fn components(&self) -> usize {
        self.m
    }
    fn q(&self, x: &[f64]) -> DMatrix<f64> {
        (self.q)(x)
    }
    fn grad_q(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        (self.grad_q)(x)
    }
    fn b(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        (self.b)(x)
    }
    fn div_b(&self, x: &[f64]) -> DMatrix<f64> {
        (self.div_b)(x)
    }
    fn vpot(&self, x: &[f64]) -> DMatrix<f64> {
        (self.vpot)(x)
    }
    fn vscal(&self, x: &[f64]) -> f64 {
        (self.v)(x)
    }
    fn grad_v(&self, x: &[f64]) -> DVector<f64> {
        (self.grad_v)(x)
    }
    fn hess_v(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        self.hess_v.as_ref().map(|f| f(x))
    }
    fn psi(&self, x: &[f64]) -> Option<ScalarJet> {
        self.psi.as_ref().map(|f| f(x))
    }
    fn phi(&self, x: &[f64]) -> Option<ScalarJet> {
        self.phi.as_ref().map(|f| f(x))
    }
    fn label(&self) -> String {
        "closure".into()
    }
}

/// Random (p, θ, κ, m, γ) with θ < p, κ and γ in [0, 2] and m in 1..=5.
pub fn random_tuple(rng: &mut impl rand::Rng, p_lo: f64, p_hi: f64) -> (f64, f64, f64, usize, f64) {
    let p = rng.random_range(p_lo..p_hi);
    let theta = rng.random_range(0.0..p);
    let kappa = rng.random_range(0.0..=2.0);
    let m = rng.random_range(1..=5);
    let gamma = rng.random_range(0.0..=2.0);
    (p, theta, kappa, m, gamma)
}
