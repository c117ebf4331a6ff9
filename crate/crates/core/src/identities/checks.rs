//! Quadrature checks of the integral identities and a-priori inequalities on test functions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::jet::Jet;
use super::operator::parts_from_jets;
use super::quadrature::QuadratureGrid;
use super::testfn::{make_complex_bump, ComplexTestFunction};
use crate::error::{Error, Result};
use crate::fields::CoefficientField;
use crate::optimizer::select_epsilons;

/// Scalar weight η(x) = 1 + a·cos(ω·x + φ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eta {
    pub amplitude: f64,
    pub freq: Vec<f64>,
    pub phase: f64,
}

impl Eta {
    pub fn constant(d: usize) -> Self {
        Eta { amplitude: 0.0, freq: vec![0.0; d], phase: 0.0 }
    }

    pub fn random(rng: &mut impl Rng, d: usize) -> Self {
        Eta {
            amplitude: rng.random_range(0.0..0.5),
            freq: (0..d).map(|_| rng.random_range(-2.0..2.0)).collect(),
            phase: rng.random_range(0.0..2.0 * PI),
        }
    }

    pub fn eval(&self, x: &[f64]) -> (f64, DVector<f64>) {
        let arg: f64 = self.phase + x.iter().zip(&self.freq).map(|(a, b)| a * b).sum::<f64>();
        let s = arg.sin();
        let grad = DVector::from_iterator(x.len(), self.freq.iter().map(|w| -self.amplitude * s * w));
        (1.0 + self.amplitude * arg.cos(), grad)
    }
}

/// One random draw of (u, η, ε, p) for the identity checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormDraw {
    pub seed: u64,
    pub u: ComplexTestFunction,
    pub eta: Eta,
    pub eps: f64,
    pub p: f64,
}

impl FormDraw {
    pub fn random(seed: u64, d: usize, m: usize, radius: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f0e5);
        let eps = [1e-1, 1e-2, 1e-4][rng.random_range(0..3)];
        let p = rng.random_range(1.1..4.0);
        let eta = Eta::random(&mut rng, d);
        let u = make_complex_bump(seed, d, m, radius, 3);
        FormDraw { seed, u, eta, eps, p }
    }
}

struct Pointwise {
    re: Vec<Jet>,
    im: Vec<Jet>,
    w: f64,
    /// ∇w_ε
    grad_w: DVector<f64>,
}

impl Pointwise {
    fn new(u: &ComplexTestFunction, x: &[f64], eps: f64) -> Self {
        let re = u.re.jets(x);
        let im = u.im.jets(x);
        let d = x.len();
        let mut w2 = eps;
        let mut g = DVector::zeros(d);
        for j in re.iter().chain(im.iter()) {
            w2 += j.value * j.value;
            g.axpy(j.value, &j.grad, 1.0);
        }
        let w = w2.sqrt();
        Pointwise { re, im, w, grad_w: g / w }
    }

    fn values(jets: &[Jet]) -> DVector<f64> {
        DVector::from_iterator(jets.len(), jets.iter().map(|j| j.value))
    }

    fn partial(jets: &[Jet], i: usize) -> DVector<f64> {
        DVector::from_iterator(jets.len(), jets.iter().map(|j| j.grad[i]))
    }

    /// ⟨Mu, u⟩ for real symmetric M and complex u.
    fn form(&self, mat: &DMatrix<f64>) -> f64 {
        let r = Self::values(&self.re);
        let i = Self::values(&self.im);
        r.dot(&(mat * &r)) + i.dot(&(mat * &i))
    }
}

fn q_form(q: &DMatrix<f64>, g: &DVector<f64>) -> f64 {
    g.dot(&(q * g))
}

fn require(grid: &QuadratureGrid, u: &ComplexTestFunction) -> Result<()> {
    if grid.d != u.re.d {
        return Err(Error::DimensionMismatch { expected: u.re.d, got: grid.d });
    }
    grid.require_support(u.support_radius())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormBi {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Both sides of the drift integration-by-parts identity
/// Re∫Σᵢ⟨BⁱDᵢu,u⟩w^{p−2}η = (2−p)/2 Σᵢ∫⟨Bⁱu,u⟩w^{p−3}ηDᵢw − ½∫⟨(div B)u,u⟩w^{p−2}η − ½∫Σᵢ⟨Bⁱu,u⟩w^{p−2}Dᵢη
/// with w = (|u|² + ε)^{1/2}.
pub fn verify_form_bi(
    field: &dyn CoefficientField,
    u: &ComplexTestFunction,
    eta: &Eta,
    eps: f64,
    p: f64,
    grid: &QuadratureGrid,
) -> Result<FormBi> {
    require(grid, u)?;
    let sums = grid.integrate_many(2, |x, out| {
        let pw = Pointwise::new(u, x, eps);
        let (e, de) = eta.eval(x);
        let bs = field.b(x);
        let wp2 = pw.w.powf(p - 2.0);
        let r = Pointwise::values(&pw.re);
        let im = Pointwise::values(&pw.im);
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for (i, bi) in bs.iter().enumerate() {
            let dr = Pointwise::partial(&pw.re, i);
            let di = Pointwise::partial(&pw.im, i);
            lhs += r.dot(&(bi * dr)) + im.dot(&(bi * di));
            let ubu = pw.form(bi);
            rhs += 0.5 * (2.0 - p) * ubu * e * pw.grad_w[i] / pw.w - 0.5 * ubu * de[i];
        }
        rhs -= 0.5 * pw.form(&field.div_b(x)) * e;
        out[0] = lhs * wp2 * e;
        out[1] = rhs * wp2;
    });
    Ok(FormBi { lhs: sums[0], rhs: sums[1], residual: (sums[0] - sums[1]).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormQ {
    /// ∫ w^{p−2} 𝔮(w)
    pub lhs: f64,
    /// Σₕ ∫ w^{p−2} 𝔮(uₕ)
    pub rhs: f64,
    pub slack: f64,
    /// Smallest pointwise value of the weighted integrand difference over the nodes.
    pub min_pointwise: f64,
}

/// Slack of ∫w^{p−2}𝔮(w) ≤ Σₕ∫w^{p−2}𝔮(uₕ), with 𝔮(f) = ⟨Q∇f,∇f⟩ and 𝔮 of a complex
/// function the sum over its real and imaginary parts.
pub fn verify_form_q(
    field: &dyn CoefficientField,
    u: &ComplexTestFunction,
    eps: f64,
    p: f64,
    grid: &QuadratureGrid,
) -> Result<FormQ> {
    require(grid, u)?;
    let integrand = |x: &[f64]| {
        let pw = Pointwise::new(u, x, eps);
        let q = field.q(x);
        let wp2 = pw.w.powf(p - 2.0);
        let lhs = q_form(&q, &pw.grad_w);
        let rhs: f64 = pw.re.iter().chain(pw.im.iter()).map(|j| q_form(&q, &j.grad)).sum();
        (lhs * wp2, rhs * wp2)
    };
    let sums = grid.integrate_many(2, |x, out| {
        let (l, r) = integrand(x);
        out[0] = l;
        out[1] = r;
    });
    let min_pointwise = grid.min_over(|x| {
        let (l, r) = integrand(x);
        r - l
    });
    Ok(FormQ { lhs: sums[0], rhs: sums[1], slack: sums[1] - sums[0], min_pointwise })
}

/// Allowed quadrature error in the sector inequality, relative to ∫|⟨𝒜u,u⟩|w^{p−2}.
pub const RDISS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rdiss {
    /// |Im ∫⟨𝒜u,u⟩w^{p−2}|
    pub im_part: f64,
    /// −Re ∫⟨𝒜u,u⟩w^{p−2}
    pub re_part: f64,
    pub c_admissible: f64,
    /// ∫|⟨𝒜u,u⟩|w^{p−2}, the scale the tolerance is measured against.
    pub magnitude: f64,
    pub holds: bool,
    /// false when re_part < −RDISS_TOL·magnitude, i.e. u is a counterexample to dissipativity.
    pub dissipative: bool,
}

/// Sector constant from the ε selection for the estimate |Im| ≤ −C·Re.
pub fn rdiss_constant(p: f64, theta: f64, kappa: f64, m: usize, gamma_cre: f64, c1: f64) -> Result<f64> {
    Ok(select_epsilons(p, theta, kappa, m, gamma_cre)?.sector_constant(c1))
}

pub fn check_rdiss(
    field: &dyn CoefficientField,
    u: &ComplexTestFunction,
    p: f64,
    eps: f64,
    c_admissible: f64,
    grid: &QuadratureGrid,
) -> Result<Rdiss> {
    require(grid, u)?;
    let sums = grid.integrate_many(3, |x, out| {
        let pw = Pointwise::new(u, x, eps);
        let ar = parts_from_jets(field, &pw.re, x).total();
        let ai = parts_from_jets(field, &pw.im, x).total();
        let r = Pointwise::values(&pw.re);
        let im = Pointwise::values(&pw.im);
        let wp2 = pw.w.powf(p - 2.0);
        out[0] = (ar.dot(&r) + ai.dot(&im)) * wp2;
        out[1] = (ai.dot(&r) - ar.dot(&im)) * wp2;
        out[2] = out[0].hypot(out[1]);
    });
    let re_part = -sums[0];
    let im_part = sums[1].abs();
    let tol = RDISS_TOL * sums[2];
    Ok(Rdiss {
        im_part,
        re_part,
        c_admissible,
        magnitude: sums[2],
        holds: im_part <= c_admissible * re_part + tol,
        dissipative: re_part >= -tol,
    })
}

/// Lᵖ norms of u and of the pieces of 𝒜u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNorms {
    pub u: f64,
    pub a0: f64,
    pub drift: f64,
    /// ‖Vu‖
    pub potential: f64,
    /// ‖v u‖ with v the scalar lower bound
    pub v_u: f64,
    pub full: f64,
    /// ‖𝒜u − u‖
    pub shifted: f64,
}

pub fn operator_norms(
    field: &dyn CoefficientField,
    u: &ComplexTestFunction,
    p: f64,
    grid: &QuadratureGrid,
) -> Result<OperatorNorms> {
    require(grid, u)?;
    let s = grid.integrate_many(7, |x, out| {
        let re = u.re.jets(x);
        let im = u.im.jets(x);
        let pr = parts_from_jets(field, &re, x);
        let pi = parts_from_jets(field, &im, x);
        let ur = Pointwise::values(&re);
        let ui = Pointwise::values(&im);
        let v = field.vscal(x);
        let pow = |a: &DVector<f64>, b: &DVector<f64>| (a.norm_squared() + b.norm_squared()).powf(p / 2.0);
        out[0] = pow(&ur, &ui);
        out[1] = pow(&pr.a0, &pi.a0);
        out[2] = pow(&pr.drift, &pi.drift);
        out[3] = pow(&pr.potential, &pi.potential);
        out[4] = pow(&(&ur * v), &(&ui * v));
        let (tr, ti) = (pr.total(), pi.total());
        out[5] = pow(&tr, &ti);
        out[6] = pow(&(&tr - &ur), &(&ti - &ui));
    });
    let r = |t: f64| t.max(0.0).powf(1.0 / p);
    Ok(OperatorNorms {
        u: r(s[0]),
        a0: r(s[1]),
        drift: r(s[2]),
        potential: r(s[3]),
        v_u: r(s[4]),
        full: r(s[5]),
        shifted: r(s[6]),
    })
}

/// ‖vu‖ₚ / ‖𝒜u‖ₚ.
pub fn check_estv(field: &dyn CoefficientField, u: &ComplexTestFunction, p: f64, grid: &QuadratureGrid) -> Result<f64> {
    let n = operator_norms(field, u, p, grid)?;
    if n.u == 0.0 {
        return Err(Error::InvalidParameters("check_estv needs a nonzero test function".into()));
    }
    if n.full == 0.0 {
        return Err(Error::NonFinite(format!("operator annihilates a nonzero test function (norm {})", n.u)));
    }
    Ok(n.v_u / n.full)
}

/// Smallest K(ε) with ‖ΣBⁱDᵢu‖ ≤ ε‖𝒜₀u‖ + K(ε)‖Vu‖, for each ε.
pub fn check_interpolation(
    field: &dyn CoefficientField,
    u: &ComplexTestFunction,
    p: f64,
    eps_list: &[f64],
    grid: &QuadratureGrid,
) -> Result<Vec<(f64, f64)>> {
    let n = operator_norms(field, u, p, grid)?;
    if n.potential == 0.0 {
        return Err(Error::InvalidParameters("check_interpolation needs Vu != 0".into()));
    }
    Ok(eps_list.iter().map(|&e| (e, ((n.drift - e * n.a0) / n.potential).max(0.0))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEquiv {
    /// ‖𝒜₀u‖ + ‖vu‖
    pub domain_norm: f64,
    /// ‖𝒜u − u‖
    pub graph_norm: f64,
    pub ratio: f64,
}

pub fn check_norm_equiv(
    field: &dyn CoefficientField,
    u: &ComplexTestFunction,
    p: f64,
    grid: &QuadratureGrid,
) -> Result<NormEquiv> {
    let n = operator_norms(field, u, p, grid)?;
    let domain_norm = n.a0 + n.v_u;
    if domain_norm == 0.0 {
        return Err(Error::InvalidParameters("check_norm_equiv needs a nonzero test function".into()));
    }
    Ok(NormEquiv { domain_norm, graph_norm: n.shifted, ratio: n.shifted / domain_norm })
}

/// Slope of log(residual) against log(h) by least squares, ignoring residuals at or below `floor`.
/// None when fewer than two residuals are above the floor.
pub fn observed_order(hs: &[f64], residuals: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(residuals)
        .filter(|(_, r)| **r > floor)
        .map(|(h, r)| (h.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}
