//! Closed-form suprema of the auxiliary functions f₁, f₂ over their feasible sets,
//! a lattice oracle for them, and the strictly-feasible ε selector.
//!
//! Four regimes, each with its own constants A…H:
//!
//! | regime    | objective                                  | feasible set                         |
//! |-----------|--------------------------------------------|--------------------------------------|
//! | `Sub2F2`  | A − B/ε₁ − C/ε₂ − D/ε₃ − D/ε₄              | E − ε₁ − Fε₂ − Gε₃ − Hε₄ > 0          |
//! | `Ge2F2`   | same                                       | E − Eε₁ − Fε₃ > 0, E − Eε₂ − Gε₄ > 0  |
//! | `Ge2F1`   | A − D/x₁ − D/x₂                            | x₁ < E/F, x₂ < E/G                    |
//! | `Sub2F1`  | A − D/x₁ − D/x₂                            | Fx₁ + Gx₂ < E                         |

mod grid;
mod select;

pub use grid::{grid_maximize, Constraint, Objective};
pub use select::{select_epsilons, Coefficient, EpsilonCertificate, Sign};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Sub2F2,
    Ge2F2,
    Ge2F1,
    Sub2F1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeConstants {
    pub regime: Regime,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

impl RegimeConstants {
    fn zeroed(regime: Regime) -> Self {
        RegimeConstants { regime, a: 0.0, b: 0.0, c: 0.0, d: 0.0, e: 1.0, f: 0.0, g: 0.0, h: 0.0 }
    }

    /// Objective value at ε (length 4 for f₂, 2 for f₁). Terms with a zero numerator are dropped.
    pub fn objective(&self, eps: &[f64]) -> f64 {
        let t = |num: f64, den: f64| if num == 0.0 { 0.0 } else { num / den };
        match self.regime {
            Regime::Sub2F2 | Regime::Ge2F2 => {
                self.a - t(self.b, eps[0]) - t(self.c, eps[1]) - t(self.d, eps[2]) - t(self.d, eps[3])
            }
            Regime::Ge2F1 | Regime::Sub2F1 => self.a - t(self.d, eps[0]) - t(self.d, eps[1]),
        }
    }

    /// Constraint slacks at ε; every entry must be positive for strict feasibility.
    pub fn constraints(&self, eps: &[f64]) -> Vec<f64> {
        let mut out = eps.to_vec();
        match self.regime {
            Regime::Sub2F2 => out.push(self.e - eps[0] - self.f * eps[1] - self.g * eps[2] - self.h * eps[3]),
            Regime::Ge2F2 => {
                out.push(self.e - self.e * eps[0] - self.f * eps[2]);
                out.push(self.e - self.e * eps[1] - self.g * eps[3]);
            }
            Regime::Ge2F1 => {
                out.push(self.e - self.f * eps[0]);
                out.push(self.e - self.g * eps[1]);
            }
            Regime::Sub2F1 => out.push(self.e - self.f * eps[0] - self.g * eps[1]),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerResult {
    pub constants: RegimeConstants,
    pub closed_form: f64,
    /// Stationary point (or its limit on the boundary), before interiorization.
    pub eps_star: Vec<f64>,
    /// 0.9·eps_star + 0.1·(interior reference point); strictly feasible.
    pub eps_interior: Vec<f64>,
    pub oracle_value: Option<f64>,
    pub oracle_gap: Option<f64>,
}

impl OptimizerResult {
    /// Runs the lattice oracle at `resolution` and records value and gap.
    pub fn with_oracle(mut self, resolution: usize) -> Result<Self> {
        let (obj, con) = grid::kind_of(self.constants.regime);
        let v = grid_maximize(obj, &self.constants, resolution, con)?;
        self.oracle_value = Some(v);
        self.oracle_gap = Some((self.closed_form - v).abs());
        Ok(self)
    }
}

const INTERIOR_WEIGHT: f64 = 0.9;

fn interiorize(star: &[f64], reference: &[f64]) -> Vec<f64> {
    star.iter()
        .zip(reference)
        .map(|(s, r)| INTERIOR_WEIGHT * s + (1.0 - INTERIOR_WEIGHT) * r)
        .collect()
}

fn check_common(p: f64, theta: f64, kappa: f64, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameters("m must be at least 1".into()));
    }
    if !(theta >= 0.0 && kappa >= 0.0) {
        return Err(Error::InvalidParameters("theta and kappa must be >= 0".into()));
    }
    if !(theta < p) {
        return Err(Error::InvalidParameters(format!("theta = {theta} must be < p = {p}")));
    }
    Ok(())
}

/// Safe a/b for the degenerate 0/0 limits: a vanishing numerator gives 0.
fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// f₂ on p ∈ (1,2).
pub fn sup_f2_sub2(p: f64, theta: f64, kappa: f64, m: usize, gamma_cre: f64) -> Result<OptimizerResult> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameters(format!("p = {p} outside (1,2)")));
    }
    check_common(p, theta, kappa, m)?;
    let mf = m as f64;
    let g = gamma_cre;
    let k = RegimeConstants {
        regime: Regime::Sub2F2,
        a: 1.0 - theta / p - (p - 1.0) / p * kappa * mf * g,
        b: g * g / 4.0,
        c: g * g * (2.0 - p) / 4.0,
        d: kappa * mf * (2.0 - p) / (4.0 * p),
        e: p - 1.0,
        f: 2.0 - p,
        g: kappa * (2.0 - p) / p,
        h: kappa * mf * (2.0 - p) / p,
    };
    let sigma = k.b.sqrt() + (k.c * k.f).sqrt() + (k.d * k.g).sqrt() + (k.d * k.h).sqrt();
    let closed_form = k.a - sigma * sigma / k.e;
    // Each variable spends a fifth of the budget E at the reference point.
    let coef = [1.0, k.f, k.g, k.h];
    let reference: Vec<f64> = coef.iter().map(|&c| if c > 0.0 { k.e / (5.0 * c) } else { 1.0 }).collect();
    let eps_star = if sigma == 0.0 {
        reference.clone()
    } else {
        let e2 = k.e * ratio(k.c, k.f).sqrt() / sigma;
        // D/G = m/4 and D/H = 1/4 whenever κ > 0; use the limits so κ = 0 stays finite.
        let (e3, e4) = if kappa > 0.0 {
            (k.e * (k.d / k.g).sqrt() / sigma, k.e * (k.d / k.h).sqrt() / sigma)
        } else {
            (k.e * mf.sqrt() / 2.0 / sigma, k.e * 0.5 / sigma)
        };
        let e1 = k.e - k.f * e2 - k.g * e3 - k.h * e4;
        vec![e1, e2, e3, e4]
    };
    let eps_interior = interiorize(&eps_star, &reference);
    Ok(OptimizerResult { constants: k, closed_form, eps_star, eps_interior, oracle_value: None, oracle_gap: None })
}

/// f₂ on p ≥ 2.
pub fn sup_f2_ge2(p: f64, theta: f64, kappa: f64, m: usize, gamma_cre: f64) -> Result<OptimizerResult> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::InvalidParameters(format!("p = {p} below 2")));
    }
    check_common(p, theta, kappa, m)?;
    let mf = m as f64;
    let g = gamma_cre;
    let k = RegimeConstants {
        regime: Regime::Ge2F2,
        a: 1.0 - theta / p - (p - 1.0) / p * kappa * mf * g,
        b: g * g / 4.0,
        c: g * g * (p - 2.0) / 4.0,
        d: kappa * mf * (p - 2.0) / (4.0 * p),
        e: p,
        f: kappa * (p - 2.0),
        g: kappa * mf,
        h: 0.0,
    };
    let closed_form = k.a - k.b - 2.0 * (k.b * k.d * k.f / k.e).sqrt() - k.d * k.f / k.e - k.c
        - 2.0 * (k.c * k.d * k.g / k.e).sqrt()
        - k.d * k.g / k.e;
    // Stationary pair (ε₃, ε₄); a vanishing D removes the 1/ε terms and the limit sits at ε₃ = ε₄ = 0.
    let e3 = if k.d > 0.0 && k.f > 0.0 {
        (k.d / k.f).sqrt() * k.e / ((k.b * k.e).sqrt() + (k.d * k.f).sqrt())
    } else {
        0.0
    };
    let e4 = if k.d > 0.0 && k.g > 0.0 {
        (k.d / k.g).sqrt() * k.e / ((k.c * k.e).sqrt() + (k.d * k.g).sqrt())
    } else {
        0.0
    };
    let e1 = 1.0 - k.f * e3 / k.e;
    let e2 = 1.0 - k.g * e4 / k.e;
    let half = |c: f64| if c > 0.0 { k.e / (2.0 * c) } else { 1.0 };
    let reference = vec![0.25, 0.25, half(k.f), half(k.g)];
    let eps_star = vec![e1, e2, e3, e4];
    let eps_interior = interiorize(&eps_star, &reference);
    Ok(OptimizerResult { constants: k, closed_form, eps_star, eps_interior, oracle_value: None, oracle_gap: None })
}

/// f₁ on p ≥ 2: the supremum sits at the far corner of the box.
pub fn sup_f1_ge2(p: f64, theta: f64, kappa: f64, m: usize) -> Result<OptimizerResult> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::InvalidParameters(format!("p = {p} below 2")));
    }
    check_common(p, theta, kappa, m)?;
    let mf = m as f64;
    let mut k = RegimeConstants::zeroed(Regime::Ge2F1);
    k.a = 1.0 - theta / p;
    k.d = kappa * mf * (p - 2.0) / (4.0 * p);
    k.e = p;
    k.f = kappa * (p - 2.0);
    k.g = kappa * mf;
    let closed_form = 1.0 - theta / p - kappa * kappa * mf * (p - 2.0) * (mf + p - 2.0) / (4.0 * p * p);
    let bound = |c: f64| if c > 0.0 { k.e / c } else { 1.0 };
    let eps_star = vec![bound(k.f), bound(k.g)];
    let reference: Vec<f64> = eps_star.iter().map(|b| 0.5 * b).collect();
    let eps_interior = interiorize(&eps_star, &reference);
    Ok(OptimizerResult { constants: k, closed_form, eps_star, eps_interior, oracle_value: None, oracle_gap: None })
}

/// f₁ on p ∈ (1,2) under the half-plane x₁ + m·x₂ < p(p−1)/((2−p)κ).
pub fn sup_f1_sub2(p: f64, theta: f64, kappa: f64, m: usize) -> Result<OptimizerResult> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameters(format!("p = {p} outside (1,2)")));
    }
    check_common(p, theta, kappa, m)?;
    let mf = m as f64;
    let mut k = RegimeConstants::zeroed(Regime::Sub2F1);
    k.a = 1.0 - theta / p;
    k.d = kappa * mf * (2.0 - p) / (4.0 * p);
    k.e = p - 1.0;
    k.f = kappa * (2.0 - p) / p;
    k.g = kappa * mf * (2.0 - p) / p;
    if kappa == 0.0 {
        return Ok(OptimizerResult {
            constants: k,
            closed_form: k.a,
            eps_star: vec![],
            eps_interior: vec![1.0, 1.0],
            oracle_value: None,
            oracle_gap: None,
        });
    }
    let c_prime = p * (p - 1.0) / ((2.0 - p) * kappa);
    let x2 = c_prime / (mf + mf.sqrt());
    let x1 = c_prime - mf * x2;
    let closed_form = k.a - k.d * (mf.sqrt() + 1.0).powi(2) / c_prime;
    let eps_star = vec![x1, x2];
    let reference = vec![c_prime / 3.0, c_prime / (3.0 * mf)];
    let eps_interior = interiorize(&eps_star, &reference);
    Ok(OptimizerResult { constants: k, closed_form, eps_star, eps_interior, oracle_value: None, oracle_gap: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::{pdis1_lhs, pdis_lhs};
    use approx::assert_abs_diff_eq;

    #[test]
    fn sub2_f2_example() {
        let r = sup_f2_sub2(1.5, 0.0, 0.2, 2, 0.1).unwrap();
        assert_abs_diff_eq!(r.closed_form, 0.915371, epsilon = 1e-6);
        assert_abs_diff_eq!(r.eps_star[1], 0.13241, epsilon = 1e-5);
        let r = sup_f2_sub2(1.5, 0.3, 0.0, 2, 0.0).unwrap();
        assert_abs_diff_eq!(r.closed_form, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn ge2_f2_examples() {
        let r = sup_f2_ge2(2.0, 0.3, 0.7, 3, 0.2).unwrap();
        assert_abs_diff_eq!(r.closed_form, pdis1_lhs(2.0, 0.3, 0.7, 3, 0.2).unwrap(), epsilon = 1e-14);
        assert_abs_diff_eq!(r.closed_form, 1.0 - 0.15 - 0.2 * (0.7 * 3.0 / 2.0 + 0.05), epsilon = 1e-14);
        let r = sup_f2_ge2(3.0, 0.4, 1.0, 2, 0.0).unwrap();
        assert_abs_diff_eq!(r.closed_form, 0.7, epsilon = 1e-14);
    }

    #[test]
    fn f1_examples() {
        assert_abs_diff_eq!(sup_f1_ge2(3.0, 0.3, 0.0, 2).unwrap().closed_form, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(sup_f1_ge2(2.0, 0.3, 1.0, 2).unwrap().closed_form, 0.85, epsilon = 1e-15);
        assert_abs_diff_eq!(sup_f1_ge2(3.0, 0.0, 1.0, 2).unwrap().closed_form, 1.0 - 6.0 / 36.0, epsilon = 1e-15);
        let r = sup_f1_sub2(1.5, 0.0, 0.2, 2).unwrap();
        assert_abs_diff_eq!(r.closed_form, 0.974096, epsilon = 1e-6);
        assert_abs_diff_eq!(r.closed_form, pdis_lhs(1.5, 0.0, 0.2, 2, 0.0).unwrap(), epsilon = 1e-14);
        assert_eq!(sup_f1_sub2(1.5, 0.3, 0.0, 2).unwrap().closed_form, 0.8);
    }

    #[test]
    fn interior_points_are_feasible() {
        let rs = [
            sup_f2_sub2(1.5, 0.0, 0.2, 2, 0.1).unwrap(),
            sup_f2_sub2(1.3, 0.1, 0.0, 1, 0.0).unwrap(),
            sup_f2_ge2(3.0, 0.4, 1.0, 2, 0.3).unwrap(),
            sup_f2_ge2(2.0, 0.4, 1.0, 2, 0.0).unwrap(),
            sup_f1_ge2(4.0, 0.4, 1.0, 2).unwrap(),
            sup_f1_sub2(1.5, 0.0, 0.2, 2).unwrap(),
        ];
        for r in rs {
            for s in r.constants.constraints(&r.eps_interior) {
                assert!(s > 0.0, "{:?} {:?}", r.constants.regime, r.eps_interior);
            }
        }
    }
}
