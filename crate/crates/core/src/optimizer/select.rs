//! Strictly feasible ε choices for the three dissipativity estimates, with the
//! bracketed coefficients they produce.

use serde::Serialize;

use super::{sup_f1_ge2, sup_f1_sub2, sup_f2_ge2, sup_f2_sub2};
use crate::admissibility::regime_lhs;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Positive,
    NonPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: &'static str,
    pub value: f64,
    pub required: Sign,
}

impl Coefficient {
    pub fn ok(&self) -> bool {
        match self.required {
            Sign::Positive => self.value > 0.0,
            Sign::NonPositive => self.value <= 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonCertificate {
    pub p: f64,
    pub kappa: f64,
    pub m: usize,
    /// (ε₀, ε₁) of the sector estimate.
    pub sector: Vec<f64>,
    /// (ε₁, …, ε₄) of the weighted potential estimate.
    pub weighted: Vec<f64>,
    /// (ε₀, ε₁, ε₂, ε₃) of the injectivity estimate.
    pub injectivity: Vec<f64>,
    pub coefficients: Vec<Coefficient>,
}

impl EpsilonCertificate {
    pub fn all_ok(&self) -> bool {
        self.coefficients.iter().all(Coefficient::ok)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients.iter().find(|c| c.name == name).map(|c| c.value)
    }

    /// Smallest admissible constant C in |Im ⟨𝒜u,u⟩| ≤ −C Re ⟨𝒜u,u⟩ given by the sector estimate.
    pub fn sector_constant(&self, c1: f64) -> f64 {
        let p = self.p;
        let k = self.kappa;
        let mf = self.m as f64;
        let (e0, e1) = (self.sector[0], self.sector[1]);
        let pot = self.coefficient("sector.potential").unwrap_or(f64::NAN);
        let pot_ratio = (c1 + k * mf / 2.0) / pot;
        if p < 2.0 {
            let diff = self.coefficient("sector.diffusion").unwrap_or(f64::NAN);
            (((2.0 - p) / 2.0 + k / 2.0 + (2.0 - p) * mf) / diff).max(pot_ratio)
        } else {
            let mut c = (p * (p - 2.0 + k) / (2.0 * (p - e0 * k * (p - 2.0)))).max(pot_ratio);
            if p > 2.0 {
                c = c.max(mf * p / (p - e1 * k * mf));
            }
            c
        }
    }
}

/// Moves each stationary point 10% toward a feasible interior point and records every
/// bracketed coefficient of the three estimates.
pub fn select_epsilons(p: f64, theta: f64, kappa: f64, m: usize, gamma_cre: f64) -> Result<EpsilonCertificate> {
    let cond = regime_lhs(p, theta, kappa, m, gamma_cre)?;
    if !(cond > 0.0) {
        let which = if p < 2.0 { "generation_sub2" } else { "generation_ge2" };
        return Err(Error::Infeasible(format!("{which} is nonpositive ({cond:.6e}) at p = {p}")));
    }
    let mf = m as f64;
    let k = kappa;
    let pos = |name, value| Coefficient { name, value, required: Sign::Positive };
    let nonpos = |name, value| Coefficient { name, value, required: Sign::NonPositive };
    let mut coefficients = Vec::new();

    let (sector, weighted, injectivity);
    if p < 2.0 {
        let s1 = sup_f1_sub2(p, theta, kappa, m)?;
        let (e0, e1) = (s1.eps_interior[0], s1.eps_interior[1]);
        let g1 = p - 1.0 + (p - 2.0) / p * k * (e0 + mf * e1);
        let f1 = s1.constants.objective(&[e0, e1]);
        coefficients.push(pos("sector.diffusion", g1));
        coefficients.push(pos("sector.potential", f1));
        sector = vec![e0, e1];

        let s2 = sup_f2_sub2(p, theta, kappa, m, gamma_cre)?;
        let e = s2.eps_interior.clone();
        let c = &s2.constants;
        coefficients.push(pos("weighted.gradient", 1.0 - e[0] - k * (2.0 - p) / p * e[2]));
        coefficients.push(pos("weighted.diffusion", c.e - e[0] - c.f * e[1] - c.g * e[2] - c.h * e[3]));
        coefficients.push(pos("weighted.potential", c.objective(&e)));
        weighted = e;

        let i0 = g1 / 2.0;
        let i2 = f1 / 2.0;
        coefficients.push(nonpos("injectivity.diffusion", i0 - g1));
        coefficients.push(nonpos("injectivity.potential", i2 - f1));
        injectivity = vec![i0, e0, i2, e1];
    } else {
        let s1 = sup_f1_ge2(p, theta, kappa, m)?;
        let (e0, e1) = (s1.eps_interior[0], s1.eps_interior[1]);
        let f1 = s1.constants.objective(&[e0, e1]);
        coefficients.push(pos("sector.diffusion", 1.0 - e0 * k * (p - 2.0) / p));
        coefficients.push(pos("sector.modulus", 1.0 - e1 * k * mf / p));
        coefficients.push(pos("sector.potential", f1));
        sector = vec![e0, e1];

        let s2 = sup_f2_ge2(p, theta, kappa, m, gamma_cre)?;
        let e = s2.eps_interior.clone();
        coefficients.push(pos("weighted.gradient", 1.0 - e[0] - k * (p - 2.0) / p * e[2]));
        coefficients.push(pos("weighted.modulus", 1.0 - e[1] - k * mf / p * e[3]));
        coefficients.push(pos("weighted.potential", s2.constants.objective(&e)));
        weighted = e;

        // The modulus term is absorbed into the component sum when its coefficient is positive,
        // since 𝔮(|u|) ≤ Σₖ 𝔮(uₖ).
        let ca = -1.0 + e0 * k * (p - 2.0) / p;
        let i0 = -ca / 2.0;
        let cb = 2.0 - p + i0 + (p - 2.0) / p * k * mf * e1;
        let i2 = f1 / 2.0;
        coefficients.push(nonpos("injectivity.gradient", ca + cb.max(0.0)));
        coefficients.push(nonpos("injectivity.potential", i2 - f1));
        injectivity = vec![i0, e0, i2, e1];
    }

    let cert = EpsilonCertificate { p, kappa, m, sector, weighted, injectivity, coefficients };
    if let Some(bad) = cert.coefficients.iter().find(|c| !c.ok()) {
        return Err(Error::Infeasible(format!(
            "coefficient {} = {:.6e} has the wrong sign at p = {p}",
            bad.name, bad.value
        )));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::pdis_lhs;

    #[test]
    fn trivial_constants() {
        for p in [1.3, 2.0, 3.5] {
            let c = select_epsilons(p, 0.0, 0.0, 2, 0.0).unwrap();
            assert!(c.all_ok());
        }
    }

    #[test]
    fn sub2_certificate_near_supremum() {
        let c = select_epsilons(1.5, 0.0, 0.2, 2, 0.0).unwrap();
        let sup = pdis_lhs(1.5, 0.0, 0.2, 2, 0.0).unwrap();
        assert!(c.coefficient("weighted.potential").unwrap() >= 0.9 * sup);
    }

    #[test]
    fn ge2_worked_example() {
        let c = select_epsilons(3.0, 0.4, 1.0, 2, 0.0).unwrap();
        assert!((c.sector[0] - 2.85).abs() < 1e-12 && (c.sector[1] - 1.425).abs() < 1e-12);
        for name in ["sector.diffusion", "sector.modulus", "sector.potential"] {
            assert!(c.coefficient(name).unwrap() > 0.0, "{name}");
        }
    }

    #[test]
    fn failing_condition_is_named() {
        let err = select_epsilons(1.5, 1.4, 2.0, 5, 1.0).unwrap_err().to_string();
        assert!(err.contains("generation_sub2"), "{err}");
    }
}
