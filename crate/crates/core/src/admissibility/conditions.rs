//! Closed-form p-admissibility conditions and the cubic analysis of the sub-2 condition at γ = 0.

use serde::Serialize;

use crate::error::{Error, Result};

fn check_const(theta: f64, kappa: f64, m: usize, gamma_cre: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameters("m must be at least 1".into()));
    }
    for (name, v) in [("theta", theta), ("kappa", kappa), ("gamma_cre", gamma_cre)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameters(format!("{name} = {v} must be finite and >= 0")));
        }
    }
    Ok(())
}

/// Generation condition for p ∈ (1,2):
/// 1 − θ/p − ((p−1)/p)κmγ − [(3−p)γ + κ(2−p)(√m+m)/p]² / (4(p−1)).
pub fn pdis_lhs(p: f64, theta: f64, kappa: f64, m: usize, gamma_cre: f64) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameters(format!("p = {p} outside (1,2)")));
    }
    check_const(theta, kappa, m, gamma_cre)?;
    let mf = m as f64;
    let sm = mf.sqrt() + mf;
    let bracket = (3.0 - p) * gamma_cre + kappa * (2.0 - p) / p * sm;
    Ok(1.0 - theta / p - (p - 1.0) / p * kappa * mf * gamma_cre - bracket * bracket / (4.0 * (p - 1.0)))
}

/// Generation condition for p ≥ 2.
pub fn pdis1_lhs(p: f64, theta: f64, kappa: f64, m: usize, gamma_cre: f64) -> Result<f64> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::InvalidParameters(format!("p = {p} below 2")));
    }
    check_const(theta, kappa, m, gamma_cre)?;
    let mf = m as f64;
    let g = gamma_cre;
    let inner = (p - 1.0) * kappa * mf / p
        + g * (p - 1.0) / 4.0
        + (p - 2.0) / (2.0 * p) * kappa * (mf.sqrt() + mf);
    Ok(1.0 - theta / p - g * inner - (p - 2.0) / (4.0 * p * p) * kappa * kappa * mf * (mf + p - 2.0))
}

/// Regime-appropriate condition value at p.
pub fn regime_lhs(p: f64, theta: f64, kappa: f64, m: usize, gamma_cre: f64) -> Result<f64> {
    if p < 2.0 {
        pdis_lhs(p, theta, kappa, m, gamma_cre)
    } else {
        pdis1_lhs(p, theta, kappa, m, gamma_cre)
    }
}

/// The two conditions at γ = 0, cleared of denominators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaZero {
    pub sub2: f64,
    pub ge2: f64,
}

pub fn gamma_zero_conditions(p: f64, theta: f64, kappa: f64, m: usize) -> GammaZero {
    let mf = m as f64;
    let sm = mf.sqrt() + mf;
    GammaZero {
        sub2: 4.0 * (p * p - theta * p) * (p - 1.0) - kappa * kappa * (2.0 - p).powi(2) * sm * sm,
        ge2: 4.0 * p * p - 4.0 * theta * p - (p - 2.0) * kappa * kappa * mf * (mf + p - 2.0),
    }
}

/// The cubic f(p) = 4(p²−θp)(p−1) − K(2−p)², K = κ²(√m+m)², expanded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Cubic {
    pub fn new(theta: f64, kappa: f64, m: usize) -> Self {
        let mf = m as f64;
        let k = kappa * kappa * (mf.sqrt() + mf).powi(2);
        Cubic {
            c3: 4.0,
            c2: -(4.0 + 4.0 * theta + k),
            c1: 4.0 * theta + 4.0 * k,
            c0: -4.0 * k,
        }
    }
    pub fn eval(&self, p: f64) -> f64 {
        ((self.c3 * p + self.c2) * p + self.c1) * p + self.c0
    }
    /// Discriminant of f′ divided by 4.
    pub fn derivative_discriminant(&self) -> f64 {
        let (a, b, c) = (3.0 * self.c3, 2.0 * self.c2, self.c1);
        (b * b - 4.0 * a * c) / 4.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicAnalysis {
    /// Discriminant of f′ (up to a positive factor); its sign decides whether f has two critical points.
    pub delta: f64,
    /// The closed-form expression printed alongside the sufficient condition.
    pub delta_printed: f64,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    /// Maximal sub-intervals of (1,2) where f > 0.
    pub admissible_intervals: Vec<(f64, f64)>,
}

pub fn cubic_analysis(theta: f64, kappa: f64, m: usize) -> CubicAnalysis {
    let f = Cubic::new(theta, kappa, m);
    let mf = m as f64;
    let k = kappa * kappa * (mf.sqrt() + mf).powi(2);
    let delta_printed = 16.0 * (theta * theta - theta + 1.0) + k * k - 32.0 * theta * k;
    let delta = f.derivative_discriminant();
    let (p1, p2) = if delta >= 0.0 {
        let a = 3.0 * f.c3;
        let b = 2.0 * f.c2;
        let sq = delta.sqrt();
        (Some((-b / 2.0 - sq) / a), Some((-b / 2.0 + sq) / a))
    } else {
        (None, None)
    };
    let admissible_intervals = positive_intervals(&|p| f.eval(p), 1.0, 2.0, 1e-3, false);
    CubicAnalysis { delta, delta_printed, p1, p2, admissible_intervals }
}

/// Union of maximal sub-intervals of [lo, hi] where `g > 0`, found by scanning at `step`
/// and bisecting each sign change to 1e-9. Open endpoints are nudged by 1e-12.
pub fn positive_intervals(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, step: f64, closed: bool) -> Vec<(f64, f64)> {
    let edge = if closed { 0.0 } else { 1e-12 };
    let a = lo + edge;
    let b = hi - edge;
    if !(b > a) {
        return Vec::new();
    }
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let xs: Vec<f64> = (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect();
    let pos: Vec<bool> = xs.iter().map(|&x| g(x) > 0.0).collect();
    let refine = |mut l: f64, mut r: f64, left_pos: bool| {
        while r - l > 1e-9 {
            let mid = 0.5 * (l + r);
            if (g(mid) > 0.0) == left_pos {
                l = mid;
            } else {
                r = mid;
            }
        }
        0.5 * (l + r)
    };
    let mut out = Vec::new();
    let mut start = if pos[0] { Some(a) } else { None };
    for k in 1..xs.len() {
        if pos[k] != pos[k - 1] {
            let root = refine(xs[k - 1], xs[k], pos[k - 1]);
            if pos[k] {
                start = Some(root);
            } else if let Some(s) = start.take() {
                out.push((s, root));
            }
        }
    }
    if let Some(s) = start {
        out.push((s, b));
    }
    out
}

/// Maximal sub-intervals of [p_min, p_max] where θ < p and the regime condition is positive.
pub fn admissible_p_set(theta: f64, kappa: f64, m: usize, gamma_cre: f64, p_min: f64, p_max: f64) -> Result<Vec<(f64, f64)>> {
    if !(p_min > 1.0 && p_max > p_min) {
        return Err(Error::InvalidParameters(format!(
            "need 1 < p_min < p_max, got [{p_min}, {p_max}]"
        )));
    }
    check_const(theta, kappa, m, gamma_cre)?;
    let g = |p: f64| {
        if theta >= p - 1e-12 {
            return -1.0;
        }
        regime_lhs(p, theta, kappa, m, gamma_cre).unwrap_or(-1.0)
    };
    Ok(positive_intervals(&g, p_min, p_max, 1e-3, true))
}

/// Conditions on κ under which the scalar semigroup dominates the vector one.
pub fn cb_conditions(p: f64, kappa: f64, m: usize) -> bool {
    let mf = m as f64;
    if p >= 2.0 {
        kappa <= (2.0 / mf).sqrt()
    } else {
        p * kappa * kappa * mf - 4.0 * (p - 1.0).powi(2) <= 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pdis_examples() {
        assert_abs_diff_eq!(pdis_lhs(1.5, 0.0, 0.2, 2, 0.0).unwrap(), 0.974096, epsilon = 1e-6);
        assert_eq!(pdis_lhs(1.5, 0.0, 0.0, 2, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(pdis_lhs(1.5, 0.0, 0.2, 2, 0.1).unwrap(), 0.915371, epsilon = 1e-6);
        assert!(pdis_lhs(2.0, 0.0, 0.0, 1, 0.0).is_err());
    }

    #[test]
    fn pdis1_examples() {
        assert_abs_diff_eq!(pdis1_lhs(2.0, 0.4, 1.7, 3, 0.0).unwrap(), 0.8, epsilon = 1e-15);
        assert_eq!(pdis1_lhs(2.0, 0.0, 0.0, 3, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(pdis1_lhs(3.0, 0.4, 1.0, 2, 0.0).unwrap(), 0.7, epsilon = 1e-14);
        assert!(pdis1_lhs(1.9, 0.0, 0.0, 1, 0.0).is_err());
    }

    #[test]
    fn gamma_zero_examples() {
        assert_abs_diff_eq!(gamma_zero_conditions(3.0, 0.4, 1.0, 2).ge2, 25.2, epsilon = 1e-12);
        let g = gamma_zero_conditions(2.0, 0.3, 0.9, 4);
        assert_abs_diff_eq!(g.sub2, 8.0 * (2.0 - 0.3), epsilon = 1e-12);
        assert_abs_diff_eq!(g.ge2, 16.0 - 8.0 * 0.3, epsilon = 1e-12);
    }

    #[test]
    fn cubic_trivial() {
        let c = cubic_analysis(0.0, 0.0, 1);
        assert_eq!(c.delta_printed, 16.0);
        // f = 4p²(p−1) is positive on all of (1,2).
        assert_eq!(c.admissible_intervals.len(), 1);
        let (a, b) = c.admissible_intervals[0];
        assert!(a < 1.0 + 1e-9 && b > 2.0 - 1e-9);
    }

    #[test]
    fn cb_examples() {
        assert!(cb_conditions(2.0, 1.0, 2));
        assert!(!cb_conditions(2.0, 1.0, 8));
        assert!(cb_conditions(1.5, 0.5, 2));
    }

    #[test]
    fn admissible_trivial_and_sufficient_case() {
        let s = admissible_p_set(0.0, 0.0, 2, 0.0, 1.1, 5.0).unwrap();
        assert_eq!(s, vec![(1.1, 5.0)]);
        let s = admissible_p_set(0.4, 1.0, 2, 0.0, 2.0, 10.0).unwrap();
        assert_eq!(s, vec![(2.0, 10.0)]);
    }
}
