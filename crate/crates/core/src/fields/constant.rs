use nalgebra::{DMatrix, DVector};

use super::{quadratic_weight, CoefficientField, ScalarJet};
use crate::error::{Error, Result};
use crate::linalg;

/// Constant coefficients: Q, Bⁱ and V fixed, v = λ_min of the symmetric part of V.
#[derive(Debug, Clone)]
pub struct ConstantField {
    q: DMatrix<f64>,
    b: Vec<DMatrix<f64>>,
    v: DMatrix<f64>,
    vscal: f64,
}

impl ConstantField {
    pub fn new(q: DMatrix<f64>, b: Vec<DMatrix<f64>>, v: DMatrix<f64>) -> Result<Self> {
        let d = q.nrows();
        let m = v.nrows();
        if !linalg::is_symmetric(&q, 0.0) || linalg::min_sym_eig(&q) <= 0.0 {
            return Err(Error::InvalidParameters("Q must be symmetric positive definite".into()));
        }
        if b.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: b.len() });
        }
        for bi in &b {
            if bi.nrows() != m || !linalg::is_symmetric(bi, 0.0) {
                return Err(Error::InvalidParameters("drift matrices must be symmetric m×m".into()));
            }
        }
        let vscal = linalg::min_sym_eig(&v);
        if vscal <= 0.0 {
            return Err(Error::InvalidParameters("potential must be uniformly positive".into()));
        }
        Ok(ConstantField { q, b, v, vscal })
    }

    /// Q = I, B = 0, V = c·I.
    pub fn heat(d: usize, m: usize, c: f64) -> Result<Self> {
        Self::new(
            DMatrix::identity(d, d),
            vec![DMatrix::zeros(m, m); d],
            DMatrix::identity(m, m) * c,
        )
    }
}

impl CoefficientField for ConstantField {
    fn dim(&self) -> usize {
        self.q.nrows()
    }
    fn components(&self) -> usize {
        self.v.nrows()
    }
    fn q(&self, _x: &[f64]) -> DMatrix<f64> {
        self.q.clone()
    }
    fn grad_q(&self, _x: &[f64]) -> Vec<DMatrix<f64>> {
        let d = self.dim();
        vec![DMatrix::zeros(d, d); d]
    }
    fn b(&self, _x: &[f64]) -> Vec<DMatrix<f64>> {
        self.b.clone()
    }
    fn div_b(&self, _x: &[f64]) -> DMatrix<f64> {
        let m = self.components();
        DMatrix::zeros(m, m)
    }
    fn vpot(&self, _x: &[f64]) -> DMatrix<f64> {
        self.v.clone()
    }
    fn vscal(&self, _x: &[f64]) -> f64 {
        self.vscal
    }
    fn grad_v(&self, _x: &[f64]) -> DVector<f64> {
        DVector::zeros(self.dim())
    }
    fn hess_v(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        let d = self.dim();
        Some(DMatrix::zeros(d, d))
    }
    fn psi(&self, x: &[f64]) -> Option<ScalarJet> {
        Some(quadratic_weight(x))
    }
    fn phi(&self, x: &[f64]) -> Option<ScalarJet> {
        Some(quadratic_weight(x))
    }
    fn theta_bound(&self) -> Option<f64> {
        Some(0.0)
    }
    fn label(&self) -> String {
        format!("constant(d={},m={})", self.dim(), self.components())
    }
}
