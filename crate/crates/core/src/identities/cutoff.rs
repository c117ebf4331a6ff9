//! Cutoffs ζₙ = ζ(n⁻¹ log ψ) built from the family's weight ψ.

use nalgebra::DVector;
use serde::Serialize;

use crate::admissibility::{sweep_min, SampleSpec};
use crate::error::{Error, Result};
use crate::fields::{CoefficientField, ScalarJet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZetaProfile {
    /// 1 − S(t−1) on [1,2] with S the quintic smoothstep 6τ⁵ − 15τ⁴ + 10τ³ (class C²).
    Quintic,
}

impl ZetaProfile {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            ZetaProfile::Quintic => {
                if t <= 1.0 {
                    (1.0, 0.0)
                } else if t >= 2.0 {
                    (0.0, 0.0)
                } else {
                    let s = t - 1.0;
                    let s2 = s * s;
                    (1.0 - s2 * s * (10.0 - 15.0 * s + 6.0 * s2), -30.0 * s2 * (1.0 - s) * (1.0 - s))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cutoff {
    pub n: f64,
    pub profile: ZetaProfile,
    /// Added to ψ so that ψ + shift ≥ 1 on the sample set.
    pub shift: f64,
}

/// Builds ζₙ for the field's ψ; when ψ dips below 1 on the sample set it is shifted up and the
/// shift is recorded.
pub fn make_cutoff(field: &dyn CoefficientField, n: f64, profile: ZetaProfile, spec: &SampleSpec) -> Result<Cutoff> {
    if !(n > 0.0) {
        return Err(Error::InvalidParameters(format!("cutoff index n = {n} must be positive")));
    }
    if field.psi(&vec![0.0; field.dim()]).is_none() {
        return Err(Error::Config(format!("{} has no weight psi", field.label())));
    }
    let low = sweep_min(spec, field.dim(), |pt| field.psi(&pt.x).map(|j| j.value));
    let shift = if low.value < 1.0 { 1.0 - low.value } else { 0.0 };
    Ok(Cutoff { n, profile, shift })
}

impl Cutoff {
    /// ζₙ(x) and its gradient.
    pub fn eval(&self, field: &dyn CoefficientField, x: &[f64]) -> Option<ScalarJet> {
        let psi = field.psi(x)?;
        let val = (psi.value + self.shift).max(1.0);
        let (z, dz) = self.profile.eval(val.ln() / self.n);
        let grad: DVector<f64> = &psi.grad * (dz / (self.n * val));
        Some(ScalarJet { value: z, grad, hess: None })
    }
}
