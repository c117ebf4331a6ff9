//! The power/exponential family:
//! q = (1+|x|²)^{α/2} I, Bⁱ = (1+|x|²)^γ e^{½(1+|x|²)^β} Aⁱ, v = e^{(1+|x|²)^β},
//! V = v I + φ K with K a block rotation and |φ| ≤ v.

use nalgebra::{DMatrix, DVector};

use super::{quadratic_weight, CoefficientField, ScalarJet};
use crate::error::{Error, Result};
use crate::linalg;

pub const MAX_COMPONENTS: usize = 8;

/// Antisymmetric coupling in the potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    None,
    /// φ(x) = scale · v(x) · tanh(x₁), |scale| ≤ 1.
    Tanh { scale: f64 },
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling::Tanh { scale: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct PowerExpParams {
    pub d: usize,
    pub m: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma_drift: f64,
    pub a_matrices: Vec<DMatrix<f64>>,
    pub coupling: Coupling,
}

impl PowerExpParams {
    /// The desk configuration used throughout the tests: d=1, m=2, α=0, β=1, γ=0, A¹ = swap.
    pub fn example1_desk() -> Self {
        PowerExpParams {
            d: 1,
            m: 2,
            alpha: 0.0,
            beta: 1.0,
            gamma_drift: 0.0,
            a_matrices: vec![linalg::swap_matrix(2)],
            coupling: Coupling::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParameters(s));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if self.m == 0 || self.m > MAX_COMPONENTS {
            return bad(format!("m = {} outside [1, {MAX_COMPONENTS}]", self.m));
        }
        if !(0.0..=2.0).contains(&self.alpha) {
            return bad(format!("alpha = {} violates alpha in [0,2]", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta = {} violates beta > 0", self.beta));
        }
        if !(self.gamma_drift >= 0.0 && self.gamma_drift <= self.alpha / 4.0) {
            return bad(format!(
                "gamma_drift = {} violates gamma_drift in [0, alpha/4] = [0, {}]",
                self.gamma_drift,
                self.alpha / 4.0
            ));
        }
        if self.a_matrices.len() != self.d {
            return bad(format!(
                "expected {} drift matrices, got {}",
                self.d,
                self.a_matrices.len()
            ));
        }
        for (i, a) in self.a_matrices.iter().enumerate() {
            if a.nrows() != self.m || a.ncols() != self.m {
                return bad(format!("drift matrix {} is not {}x{}", i + 1, self.m, self.m));
            }
            if (a - a.transpose()).amax() > 0.0 {
                return bad(format!("drift matrix {} is not symmetric", i + 1));
            }
        }
        if let Coupling::Tanh { scale } = self.coupling {
            if !(scale.abs() <= 1.0) {
                return bad(format!("coupling scale {scale} violates |scale| <= 1"));
            }
        }
        Ok(())
    }

    /// Comparability constant c₁ with |Vξ| ≤ c₁ v |ξ|.
    pub fn c1(&self) -> f64 {
        match self.coupling {
            Coupling::Tanh { scale } if self.m >= 2 => (1.0 + scale * scale).sqrt(),
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerExpField {
    params: PowerExpParams,
    rot: DMatrix<f64>,
    theta: f64,
}

pub fn make_power_exp_field(params: PowerExpParams) -> Result<PowerExpField> {
    params.validate()?;
    let theta = example1_constants(&params)?.theta;
    let rot = linalg::block_rotation(params.m);
    Ok(PowerExpField { params, rot, theta })
}

impl PowerExpField {
    pub fn params(&self) -> &PowerExpParams {
        &self.params
    }

    fn s(x: &[f64]) -> f64 {
        1.0 + x.iter().map(|t| t * t).sum::<f64>()
    }

    /// Scalar prefactor g(x) = s^γ e^{½ s^β} of the drift.
    fn drift_scale(&self, s: f64) -> f64 {
        let p = &self.params;
        s.powf(p.gamma_drift) * (0.5 * s.powf(p.beta)).exp()
    }

    fn coupling(&self, x: &[f64], v: f64) -> f64 {
        match self.params.coupling {
            Coupling::None => 0.0,
            Coupling::Tanh { scale } => scale * v * x[0].tanh(),
        }
    }
}

impl CoefficientField for PowerExpField {
    fn dim(&self) -> usize {
        self.params.d
    }
    fn components(&self) -> usize {
        self.params.m
    }

    fn q(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.params.d;
        DMatrix::identity(d, d) * Self::s(x).powf(self.params.alpha / 2.0)
    }

    fn grad_q(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let d = self.params.d;
        let a = self.params.alpha;
        let pref = a * Self::s(x).powf(a / 2.0 - 1.0);
        (0..d).map(|k| DMatrix::identity(d, d) * (pref * x[k])).collect()
    }

    fn b(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let g = self.drift_scale(Self::s(x));
        self.params.a_matrices.iter().map(|a| a * g).collect()
    }

    fn div_b(&self, x: &[f64]) -> DMatrix<f64> {
        // ∂ᵢg = g·xᵢ·(2γ/s + β s^{β−1})
        let p = &self.params;
        let s = Self::s(x);
        let g = self.drift_scale(s);
        let factor = g * (2.0 * p.gamma_drift / s + p.beta * s.powf(p.beta - 1.0));
        let mut acc = DMatrix::zeros(p.m, p.m);
        for (i, a) in p.a_matrices.iter().enumerate() {
            acc += a * (factor * x[i]);
        }
        acc
    }

    fn vpot(&self, x: &[f64]) -> DMatrix<f64> {
        let v = self.vscal(x);
        let m = self.params.m;
        DMatrix::identity(m, m) * v + &self.rot * self.coupling(x, v)
    }

    fn vscal(&self, x: &[f64]) -> f64 {
        Self::s(x).powf(self.params.beta).exp()
    }

    fn grad_v(&self, x: &[f64]) -> DVector<f64> {
        let b = self.params.beta;
        let s = Self::s(x);
        let c = 2.0 * b * self.vscal(x) * s.powf(b - 1.0);
        DVector::from_iterator(x.len(), x.iter().map(|t| c * t))
    }

    fn hess_v(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let b = self.params.beta;
        let s = Self::s(x);
        let v = self.vscal(x);
        let d = x.len();
        let sb1 = s.powf(b - 1.0);
        let sb2 = s.powf(b - 2.0);
        Some(DMatrix::from_fn(d, d, |k, l| {
            let dvl = 2.0 * b * v * sb1 * x[l];
            let delta = if k == l { 1.0 } else { 0.0 };
            2.0 * b * (dvl * sb1 * x[k] + v * (b - 1.0) * sb2 * 2.0 * x[l] * x[k] + v * sb1 * delta)
        }))
    }

    fn psi(&self, x: &[f64]) -> Option<ScalarJet> {
        Some(quadratic_weight(x))
    }

    fn phi(&self, x: &[f64]) -> Option<ScalarJet> {
        Some(quadratic_weight(x))
    }

    fn theta_bound(&self) -> Option<f64> {
        Some(self.theta)
    }

    fn label(&self) -> String {
        let p = &self.params;
        format!(
            "power_exp(d={},m={},alpha={},beta={},gamma_drift={})",
            p.d, p.m, p.alpha, p.beta, p.gamma_drift
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Example1Constants {
    /// max_k Σ_h (Σᵢ (Aⁱ_hk)²)^{1/2}
    pub a0: f64,
    /// max over r ≥ 0 of r(1+r²)^{β+γ−1} e^{−½(1+r²)^β}
    pub c0_max: f64,
    /// Euclidean norm of the per-matrix spectral radii.
    pub lambda_norm: f64,
    /// (2γ+β)·|λ|·c0_max
    pub theta: f64,
}

pub fn example1_constants(params: &PowerExpParams) -> Result<Example1Constants> {
    params.validate()?;
    let m = params.m;
    let mut a0 = 0.0_f64;
    for k in 0..m {
        let col: f64 = (0..m)
            .map(|h| {
                params
                    .a_matrices
                    .iter()
                    .map(|a| a[(h, k)] * a[(h, k)])
                    .sum::<f64>()
                    .sqrt()
            })
            .sum();
        a0 = a0.max(col);
    }
    let lambda_norm = params
        .a_matrices
        .iter()
        .map(|a| linalg::sym_spectral_radius(a).powi(2))
        .sum::<f64>()
        .sqrt();
    let c0_max = c0_max(params.beta, params.gamma_drift);
    let theta = (2.0 * params.gamma_drift + params.beta) * lambda_norm * c0_max;
    Ok(Example1Constants { a0, c0_max, lambda_norm, theta })
}

fn c0_objective(r: f64, beta: f64, gamma: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let s = 1.0 + r * r;
    (r.ln() + (beta + gamma - 1.0) * s.ln() - 0.5 * s.powf(beta)).exp()
}

/// Maximizer of the radial profile: coarse scan on [0, R*] then golden section to 1e-10.
fn c0_max(beta: f64, gamma: f64) -> f64 {
    let f = |r: f64| c0_objective(r, beta, gamma);
    let mut peak = f(1.0);
    let mut r_star = 1.0;
    loop {
        let val = f(r_star);
        peak = peak.max(val);
        if val < 1e-12 * peak && r_star > 1.0 {
            break;
        }
        r_star *= 1.5;
        if r_star > 1e6 {
            break;
        }
    }
    let n = 4000;
    let dr = r_star / n as f64;
    let mut best: usize = 0;
    let mut best_val = f64::MIN;
    for k in 0..=n {
        let val = f(k as f64 * dr);
        if val > best_val {
            best_val = val;
            best = k;
        }
    }
    let lo = (best.saturating_sub(1)) as f64 * dr;
    let hi = (best + 1) as f64 * dr;
    let r = golden_max(&f, lo, hi, 1e-10);
    f(r).max(best_val)
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::fd;
    use approx::assert_relative_eq;

    fn field(alpha: f64, beta: f64, gamma: f64, d: usize) -> PowerExpField {
        let m = 2;
        let a = (0..d)
            .map(|i| DMatrix::from_row_slice(2, 2, &[i as f64, 1.0, 1.0, -0.5]))
            .collect();
        make_power_exp_field(PowerExpParams {
            d,
            m,
            alpha,
            beta,
            gamma_drift: gamma,
            a_matrices: a,
            coupling: Coupling::default(),
        })
        .unwrap()
    }

    #[test]
    fn trivial_point_values() {
        let f = field(2.0, 1.0, 0.0, 1);
        assert_eq!(f.q(&[0.0]), DMatrix::identity(1, 1));
        assert_relative_eq!(f.vscal(&[0.0]), std::f64::consts::E, epsilon = 1e-15);
        let desk = make_power_exp_field(PowerExpParams::example1_desk()).unwrap();
        let b0 = &desk.b(&[0.0])[0];
        assert_relative_eq!(b0[(0, 1)], 0.5f64.exp(), epsilon = 1e-15);
        assert_eq!(b0[(0, 0)], 0.0);
    }

    #[test]
    fn desk_constants() {
        let c = example1_constants(&PowerExpParams::example1_desk()).unwrap();
        assert_eq!(c.a0, 1.0);
        assert!((c.c0_max - (-1f64).exp()).abs() < 1e-9);
        assert!((c.theta - (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        let mut p = PowerExpParams::example1_desk();
        p.alpha = 3.0;
        let msg = make_power_exp_field(p).unwrap_err().to_string();
        assert!(msg.contains("alpha in [0,2]"), "{msg}");
    }

    #[test]
    fn derivatives_second_order() {
        for (alpha, beta, gamma, d) in [(2.0, 0.5, 0.3, 2), (1.0, 1.0, 0.0, 1), (0.5, 0.7, 0.1, 2)] {
            let f = field(alpha, beta, gamma, d);
            let x: Vec<f64> = (0..d).map(|k| 0.4 + 0.3 * k as f64).collect();
            let gq = f.grad_q(&x);
            let gv = f.grad_v(&x);
            let db = f.div_b(&x);
            let err = |h: f64| {
                let e1 = (0..d)
                    .map(|k| (&fd::fd_grad_q(&f, &x, h)[k] - &gq[k]).amax())
                    .fold(0.0, f64::max);
                let e2 = (fd::fd_grad_v(&f, &x, h) - &gv).amax() / gv.amax().max(1.0);
                let e3 = (fd::fd_div_b(&f, &x, h) - &db).amax() / db.amax().max(1.0);
                e1.max(e2).max(e3)
            };
            let (ec, ef) = (err(1e-2), err(5e-3));
            let order = (ec / ef).log2();
            assert!(order > 1.9, "order {order} for alpha={alpha}");
        }
    }

    #[test]
    fn hess_v_matches_fd_of_grad() {
        let f = field(1.0, 0.8, 0.1, 2);
        let x = [0.3, -0.6];
        let h = 1e-5;
        let hv = f.hess_v(&x).unwrap();
        for l in 0..2 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[l] += h;
            xm[l] -= h;
            let col = (f.grad_v(&xp) - f.grad_v(&xm)) / (2.0 * h);
            for k in 0..2 {
                assert_relative_eq!(col[k], hv[(k, l)], max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn potential_bounds() {
        let f = field(1.0, 1.0, 0.0, 1);
        for x in [-2.0, -0.5, 0.0, 0.7, 1.9] {
            let v = f.vscal(&[x]);
            let vp = f.vpot(&[x]);
            assert!(linalg::min_sym_eig(&vp) >= v * (1.0 - 1e-14));
            assert!(linalg::op_norm(&vp) <= f.params().c1() * v * (1.0 + 1e-14));
            assert!(v >= std::f64::consts::E);
        }
    }
}
