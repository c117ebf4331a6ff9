//! Brute-force lattice maximization of f₁/f₂ over their feasible sets.
//!
//! Every axis is parameterized by the fraction t of its largest feasible value and sampled
//! on the union of the log-uniform lattice t_k = lo·(hi/lo)^{k/n} and the uniform lattice
//! t_k = k/n. Doubling n keeps every old point, so the lattice maximum can only increase
//! with resolution.
//!
//! ε₁ (ε₂ as well in the p ≥ 2 case of f₂, and the second variable of f₁ on (1,2)) only
//! enter through a decreasing −B/ε term bounded by a linear constraint, so they are set to
//! their largest value on the shrunk region.

use rayon::prelude::*;

use super::{Regime, RegimeConstants};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    F1,
    F2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    G1Halfspace,
    Ge2Box,
}

pub(crate) fn kind_of(regime: Regime) -> (Objective, Constraint) {
    match regime {
        Regime::Sub2F2 => (Objective::F2, Constraint::G1Halfspace),
        Regime::Ge2F2 => (Objective::F2, Constraint::Ge2Box),
        Regime::Ge2F1 => (Objective::F1, Constraint::Ge2Box),
        Regime::Sub2F1 => (Objective::F1, Constraint::G1Halfspace),
    }
}

const MARGIN: f64 = 1e-6;
const LOWEST_FRACTION: f64 = 1e-4;

fn lattice(n: usize) -> Vec<f64> {
    let lo = LOWEST_FRACTION;
    let hi = 1.0 - MARGIN;
    let mut pts: Vec<f64> = (0..=n).map(|k| lo * (hi / lo).powf(k as f64 / n as f64)).collect();
    pts.extend((1..n).map(|k| k as f64 / n as f64).filter(|t| *t > lo));
    pts.sort_by(f64::total_cmp);
    pts
}

fn axis(n: usize, scale: f64) -> Vec<f64> {
    let s = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    lattice(n).into_iter().map(|t| t * s).collect()
}

fn term(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn upper(e: f64, coef: f64) -> f64 {
    if coef > 0.0 {
        e / coef
    } else {
        1.0
    }
}

/// Maximum of the objective over the lattice of resolution `n` per axis.
pub fn grid_maximize(objective: Objective, k: &RegimeConstants, n: usize, constraint: Constraint) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameters("resolution must be at least 2".into()));
    }
    if kind_of(k.regime) != (objective, constraint) {
        return Err(Error::InvalidParameters(format!(
            "objective/constraint pair does not match regime {:?}",
            k.regime
        )));
    }
    let best = match k.regime {
        Regime::Sub2F2 => sub2_f2(k, n),
        Regime::Ge2F2 => ge2_f2(k, n),
        Regime::Ge2F1 => ge2_f1(k, n),
        Regime::Sub2F1 => sub2_f1(k, n),
    };
    if best == f64::NEG_INFINITY {
        return Err(Error::Infeasible("no lattice point satisfies the constraint".into()));
    }
    Ok(best)
}

fn sub2_f2(k: &RegimeConstants, n: usize) -> f64 {
    let e2 = axis(n, upper(k.e, k.f));
    let e3 = axis(n, upper(k.e, k.g));
    let e4 = axis(n, upper(k.e, k.h));
    let c_terms: Vec<f64> = e2.iter().map(|&x| term(k.c, x)).collect();
    e3.par_iter()
        .map(|&x3| {
            let mut best = f64::NEG_INFINITY;
            for &x4 in &e4 {
                let rem = k.e - k.g * x3 - k.h * x4;
                let partial = k.a - term(k.d, x3) - term(k.d, x4);
                for (j, &x2) in e2.iter().enumerate() {
                    let s = (rem - k.f * x2) * (1.0 - MARGIN);
                    if s <= 0.0 {
                        break;
                    }
                    let v = partial - term(k.b, s) - c_terms[j];
                    if v > best {
                        best = v;
                    }
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn ge2_f2(k: &RegimeConstants, n: usize) -> f64 {
    let e3 = axis(n, upper(k.e, k.f));
    let e4 = axis(n, upper(k.e, k.g));
    e3.par_iter()
        .map(|&x3| {
            let x1 = (1.0 - k.f * x3 / k.e) * (1.0 - MARGIN);
            let mut best = f64::NEG_INFINITY;
            if x1 <= 0.0 {
                return best;
            }
            for &x4 in &e4 {
                let x2 = (1.0 - k.g * x4 / k.e) * (1.0 - MARGIN);
                if x2 <= 0.0 {
                    continue;
                }
                let v = k.objective(&[x1, x2, x3, x4]);
                if v > best {
                    best = v;
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn ge2_f1(k: &RegimeConstants, n: usize) -> f64 {
    let x1s = axis(n, upper(k.e, k.f));
    let x2s = axis(n, upper(k.e, k.g));
    x1s.par_iter()
        .map(|&x1| x2s.iter().map(|&x2| k.objective(&[x1, x2])).fold(f64::NEG_INFINITY, f64::max))
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn sub2_f1(k: &RegimeConstants, n: usize) -> f64 {
    let x1s = axis(n, upper(k.e, k.f));
    x1s.par_iter()
        .map(|&x1| {
            let rem = k.e - k.f * x1;
            if rem <= MARGIN * k.e {
                return f64::NEG_INFINITY;
            }
            let x2 = if k.g > 0.0 { rem / k.g * (1.0 - MARGIN) } else { 1.0 };
            k.objective(&[x1, x2])
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::*;

    #[test]
    fn flat_objective_returns_a() {
        let r = sup_f2_sub2(1.5, 0.3, 0.0, 2, 0.0).unwrap();
        let v = grid_maximize(Objective::F2, &r.constants, 10, Constraint::G1Halfspace).unwrap();
        assert_eq!(v, r.constants.a);
    }

    #[test]
    fn mismatched_pair_rejected() {
        let r = sup_f2_sub2(1.5, 0.3, 0.2, 2, 0.1).unwrap();
        assert!(grid_maximize(Objective::F1, &r.constants, 10, Constraint::G1Halfspace).is_err());
    }

    #[test]
    fn examples_within_tolerance() {
        let r = sup_f2_sub2(1.5, 0.0, 0.2, 2, 0.1).unwrap().with_oracle(200).unwrap();
        assert!(r.oracle_gap.unwrap() < 1e-3, "{r:?}");
        let r = sup_f2_ge2(3.0, 0.4, 1.0, 2, 0.0).unwrap().with_oracle(200).unwrap();
        assert!(r.oracle_gap.unwrap() < 1e-3, "{r:?}");
        let r = sup_f1_ge2(3.0, 0.0, 1.0, 2).unwrap().with_oracle(200).unwrap();
        assert!(r.oracle_gap.unwrap() < 1e-3, "{r:?}");
        let r = sup_f1_sub2(1.5, 0.0, 0.2, 2).unwrap().with_oracle(200).unwrap();
        assert!(r.oracle_gap.unwrap() < 1e-3, "{r:?}");
    }
}
