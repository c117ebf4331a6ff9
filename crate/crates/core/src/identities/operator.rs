//! Exact pointwise evaluation of 𝒜 on test functions.

use nalgebra::DVector;

use super::jet::Jet;
use super::testfn::TestFunction;
use crate::fields::CoefficientField;

/// The three parts of 𝒜u at a point; `total()` is 𝒜₀u + Σ BⁱDᵢu − Vu.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorParts {
    pub a0: DVector<f64>,
    pub drift: DVector<f64>,
    pub potential: DVector<f64>,
}

impl OperatorParts {
    pub fn total(&self) -> DVector<f64> {
        &self.a0 + &self.drift + &self.potential
    }
}

pub(crate) fn a0_from_jets(field: &dyn CoefficientField, jets: &[Jet], x: &[f64]) -> DVector<f64> {
    let q = field.q(x);
    let dq = field.grad_q(x);
    let d = x.len();
    DVector::from_iterator(
        jets.len(),
        jets.iter().map(|j| {
            let mut acc = 0.0;
            for i in 0..d {
                for k in 0..d {
                    acc += q[(i, k)] * j.hess[(i, k)] + dq[i][(i, k)] * j.grad[k];
                }
            }
            acc
        }),
    )
}

pub(crate) fn drift_from_jets(field: &dyn CoefficientField, jets: &[Jet], x: &[f64]) -> DVector<f64> {
    let m = jets.len();
    let mut out = DVector::zeros(m);
    for (i, bi) in field.b(x).iter().enumerate() {
        let di = DVector::from_iterator(m, jets.iter().map(|j| j.grad[i]));
        out += bi * di;
    }
    out
}

pub(crate) fn potential_from_jets(field: &dyn CoefficientField, jets: &[Jet], x: &[f64]) -> DVector<f64> {
    let u = DVector::from_iterator(jets.len(), jets.iter().map(|j| j.value));
    -(field.vpot(x) * u)
}

pub(crate) fn parts_from_jets(field: &dyn CoefficientField, jets: &[Jet], x: &[f64]) -> OperatorParts {
    OperatorParts {
        a0: a0_from_jets(field, jets, x),
        drift: drift_from_jets(field, jets, x),
        potential: potential_from_jets(field, jets, x),
    }
}

/// (𝒜₀u)ₕ = Σᵢⱼ (qᵢⱼ Dᵢⱼuₕ + Dᵢqᵢⱼ Dⱼuₕ).
pub fn apply_a0(field: &dyn CoefficientField, u: &TestFunction, x: &[f64]) -> DVector<f64> {
    a0_from_jets(field, &u.jets(x), x)
}

/// Σᵢ BⁱDᵢu.
pub fn apply_drift(field: &dyn CoefficientField, u: &TestFunction, x: &[f64]) -> DVector<f64> {
    drift_from_jets(field, &u.jets(x), x)
}

/// −Vu.
pub fn apply_potential(field: &dyn CoefficientField, u: &TestFunction, x: &[f64]) -> DVector<f64> {
    potential_from_jets(field, &u.jets(x), x)
}

pub fn apply_operator(field: &dyn CoefficientField, u: &TestFunction, x: &[f64]) -> DVector<f64> {
    parts_from_jets(field, &u.jets(x), x).total()
}

pub fn operator_parts(field: &dyn CoefficientField, u: &TestFunction, x: &[f64]) -> OperatorParts {
    parts_from_jets(field, &u.jets(x), x)
}
