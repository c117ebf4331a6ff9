//! Coefficient families for 𝒜u = div(Q∇u) + Σᵢ BⁱDᵢu − Vu.
//!
//! A field is a bundle of closures of x: the diffusion matrix Q, the drift
//! matrices Bⁱ, the matrix potential V and its scalar lower bound v, plus the
//! analytic derivatives the checks need.

mod constant;
mod power_exp;

pub use constant::ConstantField;
pub use power_exp::{example1_constants, make_power_exp_field, Coupling, Example1Constants, PowerExpField, PowerExpParams};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Value, gradient and (optionally) Hessian of a scalar function at a point.
#[derive(Debug, Clone)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: Option<DMatrix<f64>>,
}

pub trait CoefficientField: Send + Sync {
    /// Spatial dimension d.
    fn dim(&self) -> usize;
    /// Number of components m.
    fn components(&self) -> usize;

    /// d×d diffusion matrix.
    fn q(&self, x: &[f64]) -> DMatrix<f64>;
    /// `grad_q(x)[k]` is the entrywise derivative ∂ₖQ.
    fn grad_q(&self, x: &[f64]) -> Vec<DMatrix<f64>>;
    /// The d drift matrices Bⁱ (each m×m, symmetric).
    fn b(&self, x: &[f64]) -> Vec<DMatrix<f64>>;
    /// Σᵢ DᵢBⁱ.
    fn div_b(&self, x: &[f64]) -> DMatrix<f64>;
    /// m×m potential.
    fn vpot(&self, x: &[f64]) -> DMatrix<f64>;
    /// Scalar lower bound v of the potential.
    fn vscal(&self, x: &[f64]) -> f64;
    fn grad_v(&self, x: &[f64]) -> DVector<f64>;
    /// Hessian of v, when the family codes it.
    fn hess_v(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    /// Lyapunov-type weight used by the cutoff construction.
    fn psi(&self, _x: &[f64]) -> Option<ScalarJet> {
        None
    }
    /// Lyapunov function for the scalar operator div(Q∇) − v.
    fn phi(&self, _x: &[f64]) -> Option<ScalarJet> {
        None
    }

    /// If every Bⁱ is a multiple bᵢ·I, the vector b(x).
    fn diagonal_drift(&self, x: &[f64]) -> Option<DVector<f64>> {
        let m = self.components();
        let bs = self.b(x);
        let mut out = DVector::zeros(bs.len());
        for (i, bi) in bs.iter().enumerate() {
            let s = bi[(0, 0)];
            let resid = bi - DMatrix::<f64>::identity(m, m) * s;
            if resid.amax() > 1e-14 * (1.0 + s.abs()) {
                return None;
            }
            out[i] = s;
        }
        Some(out)
    }

    /// Divergence of the diagonal drift vector (only meaningful when `diagonal_drift` is Some).
    fn div_diagonal_drift(&self, x: &[f64]) -> f64 {
        self.div_b(x)[(0, 0)]
    }

    /// Certified upper bound for θ from the family's closed-form analysis, if any.
    fn theta_bound(&self) -> Option<f64> {
        None
    }

    /// Short family identifier for reports.
    fn label(&self) -> String;
}

/// Minimum eigenvalue μ(x) of Q(x).
pub fn min_eig_q(field: &dyn CoefficientField, x: &[f64]) -> Result<f64> {
    let q = field.q(x);
    check_sym(&q, x)?;
    Ok(linalg::min_sym_eig(&q))
}

/// ρ(x) = |Q(x)|^{1/2} v(x)^{−1/2}, with |Q| the spectral norm.
pub fn corr_radius(field: &dyn CoefficientField, x: &[f64]) -> Result<f64> {
    let q = field.q(x);
    check_sym(&q, x)?;
    let qn = linalg::sym_spectral_radius(&q);
    Ok((qn / field.vscal(x)).sqrt())
}

fn check_sym(q: &DMatrix<f64>, x: &[f64]) -> Result<()> {
    if !linalg::is_symmetric(q, 1e-12) {
        return Err(Error::InvalidParameters(format!(
            "diffusion matrix is not symmetric at x = {x:?}"
        )));
    }
    Ok(())
}

/// Scalar operator div(Q∇f) − v f applied to a scalar jet with Hessian.
pub fn apply_scalar_av(field: &dyn CoefficientField, x: &[f64], f: &ScalarJet) -> Option<f64> {
    let hess = f.hess.as_ref()?;
    let q = field.q(x);
    let dq = field.grad_q(x);
    let d = field.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += q[(i, j)] * hess[(i, j)] + dq[i][(i, j)] * f.grad[j];
        }
    }
    Some(acc - field.vscal(x) * f.value)
}

/// ψ(x) = φ(x) = 1 + |x|² with its derivatives.
pub(crate) fn quadratic_weight(x: &[f64]) -> ScalarJet {
    let d = x.len();
    let r2: f64 = x.iter().map(|t| t * t).sum();
    ScalarJet {
        value: 1.0 + r2,
        grad: DVector::from_iterator(d, x.iter().map(|t| 2.0 * t)),
        hess: Some(DMatrix::identity(d, d) * 2.0),
    }
}

#[cfg(test)]
pub(crate) mod fd {
    //! Central-difference helpers shared by the field tests.
    use super::*;

    pub fn fd_grad_v(f: &dyn CoefficientField, x: &[f64], h: f64) -> DVector<f64> {
        let d = x.len();
        DVector::from_fn(d, |k, _| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            (f.vscal(&xp) - f.vscal(&xm)) / (2.0 * h)
        })
    }

    pub fn fd_grad_q(f: &dyn CoefficientField, x: &[f64], h: f64) -> Vec<DMatrix<f64>> {
        (0..x.len())
            .map(|k| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                (f.q(&xp) - f.q(&xm)) / (2.0 * h)
            })
            .collect()
    }

    pub fn fd_div_b(f: &dyn CoefficientField, x: &[f64], h: f64) -> DMatrix<f64> {
        let m = f.components();
        let mut acc = DMatrix::zeros(m, m);
        for i in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            acc += (&f.b(&xp)[i] - &f.b(&xm)[i]) / (2.0 * h);
        }
        acc
    }
}
