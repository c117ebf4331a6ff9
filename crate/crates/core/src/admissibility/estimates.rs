//! Sample-based estimates of the structural constants. Every estimate is the maximum
//! of its defining ratio over the sample set, hence a lower bound for the true supremum.

use nalgebra::DVector;
use serde::Serialize;

use super::sampling::{sweep_max, sweep_min, SamplePoint, SampleSpec, SweepMax};
use crate::error::{Error, Result};
use crate::fields::{apply_scalar_av, CoefficientField};
use crate::linalg;

const DEGENERATE: f64 = 1e-14;

/// Largest ratio N_k(η)/(√v ‖η‖_Q) over the directions of one sample point and all k,
/// where N_k(η) = Σ_h |Σᵢ Bⁱ_hk ηᵢ|. By the mediant inequality this is the supremum of the
/// full coupling ratio over (η¹, …, ηᵐ) restricted to the sampled directions.
fn coupling_ratio(field: &dyn CoefficientField, sp: &SamplePoint) -> Option<f64> {
    let x = &sp.x;
    let m = field.components();
    let bs = field.b(x);
    let q = field.q(x);
    let sv = field.vscal(x).sqrt();
    let mut best: Option<f64> = None;
    for eta in &sp.etas {
        let qn = linalg::quad_form(&q, eta).sqrt();
        let den = sv * qn;
        if !(den > DEGENERATE) {
            continue;
        }
        for k in 0..m {
            let num: f64 = (0..m)
                .map(|h| bs.iter().enumerate().map(|(i, b)| b[(h, k)] * eta[i]).sum::<f64>().abs())
                .sum();
            let r = num / den;
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    best
}

pub fn estimate_kappa(field: &dyn CoefficientField, spec: &SampleSpec) -> Result<SweepMax> {
    let r = sweep_max(spec, field.dim(), |sp| coupling_ratio(field, sp));
    if r.value.is_nan() {
        return Err(Error::InvalidParameters("all samples degenerate in the coupling estimate".into()));
    }
    Ok(r)
}

/// Largest −λ_min(div B)/v, clipped at 0; the ξ-supremum is taken exactly by eigenvalues.
pub fn estimate_theta(field: &dyn CoefficientField, spec: &SampleSpec) -> Result<SweepMax> {
    let r = sweep_max(spec, field.dim(), |sp| {
        let v = field.vscal(&sp.x);
        if !(v > DEGENERATE) {
            return None;
        }
        Some((-linalg::min_sym_eig(&field.div_b(&sp.x)) / v).max(0.0))
    });
    if r.value.is_nan() {
        return Err(Error::InvalidParameters("all samples degenerate in the divergence estimate".into()));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrevFit {
    pub gamma: f64,
    pub c_gamma: f64,
    /// (γ, C_γ) on the full grid.
    pub frontier: Vec<(f64, f64)>,
}

/// Growth of ∇v against v^{3/2}: for each γ in `gammas`, C_γ = max (LHS − γ v^{3/2})⁺ where
/// LHS = ⟨Q∇v,∇v⟩^{1/2} (p ≤ 2) or |Q|^{1/2}|∇v| (p > 2). Returns the smallest C_γ over
/// γ ≤ `gamma_cap`, ties to the smallest γ.
pub fn fit_crev(field: &dyn CoefficientField, spec: &SampleSpec, p: f64, gammas: &[f64], gamma_cap: f64) -> CrevFit {
    let d = field.dim();
    // (LHS, v^{3/2}) per sample, reused across the γ grid.
    let pairs: Vec<(f64, f64)> = (0..spec.points)
        .map(|k| {
            let sp = spec.point(k, d);
            let x = &sp.x;
            let gv = field.grad_v(x);
            let q = field.q(x);
            let lhs = if p > 2.0 {
                linalg::sym_spectral_radius(&q).sqrt() * gv.norm()
            } else {
                linalg::quad_form(&q, &gv).max(0.0).sqrt()
            };
            (lhs, field.vscal(x).powf(1.5))
        })
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .collect();
    let frontier: Vec<(f64, f64)> = gammas
        .iter()
        .map(|&g| {
            let c = pairs.iter().map(|(l, v)| (l - g * v).max(0.0)).fold(0.0, f64::max);
            (g, c)
        })
        .collect();
    let (gamma, c_gamma) = frontier
        .iter()
        .filter(|(g, _)| *g <= gamma_cap)
        .fold(None, |acc: Option<(f64, f64)>, &(g, c)| match acc {
            Some((_, bc)) if bc <= c => acc,
            _ => Some((g, c)),
        })
        .unwrap_or((f64::NAN, f64::NAN));
    CrevFit { gamma, c_gamma, frontier }
}

/// Log grid {0} ∪ {cap·10^{−4+4k/n}}, k = 0..n.
pub fn log_grid(cap: f64, n: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    if cap > 0.0 {
        g.extend((0..=n).map(|k| cap * 10f64.powf(-4.0 + 4.0 * k as f64 / n as f64)));
    }
    g
}

/// For each κ in `kappas`, the smallest C_κ with coupling ≤ (κ√v + C_κ)·Σ‖ηᵏ‖_Q on the samples.
pub fn fit_new_k(field: &dyn CoefficientField, spec: &SampleSpec, kappas: &[f64]) -> Vec<(f64, f64)> {
    let d = field.dim();
    let per_point: Vec<(f64, f64)> = (0..spec.points)
        .filter_map(|k| {
            let sp = spec.point(k, d);
            let sv = field.vscal(&sp.x).sqrt();
            coupling_ratio(field, &sp).map(|r| (r * sv, sv))
        })
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .collect();
    kappas
        .iter()
        .map(|&k| (k, per_point.iter().map(|(r, sv)| (r - k * sv).max(0.0)).fold(0.0, f64::max)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oscillation {
    pub c2: f64,
    pub gradient_term: f64,
    pub size_term: f64,
    pub ok: bool,
    pub rejected: usize,
}

fn grad_q_norm(field: &dyn CoefficientField, y: &[f64]) -> f64 {
    field.grad_q(y).iter().map(|g| linalg::op_norm(g).powi(2)).sum::<f64>().sqrt()
}

/// c₂ = max of sup_{|y−x|≤ρ(x)} |∇Q(y)|·ρ(x)/μ(x), joined with max |Q(x)|/v(x).
pub fn check_oscillation(field: &dyn CoefficientField, spec: &SampleSpec, cap: f64) -> Oscillation {
    let d = field.dim();
    let grad = sweep_max(spec, d, |sp| {
        let x = &sp.x;
        let q = field.q(x);
        let mu = linalg::min_sym_eig(&q);
        if !(mu > DEGENERATE) {
            return None;
        }
        let rho = (linalg::sym_spectral_radius(&q) / field.vscal(x)).sqrt();
        let mut sup = grad_q_norm(field, x);
        for off in &sp.inner {
            let y: Vec<f64> = x.iter().zip(off).map(|(a, o)| a + rho * o).collect();
            sup = sup.max(grad_q_norm(field, &y));
        }
        Some(sup * rho / mu)
    });
    let size = sweep_max(spec, d, |sp| Some(linalg::sym_spectral_radius(&field.q(&sp.x)) / field.vscal(&sp.x)));
    let g = if grad.value.is_nan() { 0.0 } else { grad.value };
    let s = if size.value.is_nan() { 0.0 } else { size.value };
    let c2 = g.max(s);
    Oscillation { c2, gradient_term: g, size_term: s, ok: c2.is_finite() && c2 <= cap, rejected: grad.skipped }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiGrowth {
    /// max 𝔮(ψ)/(ψ log ψ)² over samples with log ψ ≥ 1.
    pub c: f64,
    /// max −⟨b,∇ψ⟩/(ψ log ψ) for diagonal drift; None otherwise.
    pub c1: Option<f64>,
    pub c2: f64,
    /// Shift added to ψ so that ψ ≥ 1 on the samples.
    pub shift: f64,
    pub counted: usize,
}

/// Growth of the cutoff weight. The ratio is evaluated where log ψ ≥ 1, the only region the
/// cutoffs ζ(n⁻¹ log ψ), n ≥ 1, differentiate.
pub fn check_psi_growth(field: &dyn CoefficientField, spec: &SampleSpec) -> Result<PsiGrowth> {
    let d = field.dim();
    if field.psi(&vec![0.0; d]).is_none() {
        return Err(Error::Config("field has no weight function psi".into()));
    }
    let min_psi = sweep_min(spec, d, |sp| field.psi(&sp.x).map(|j| j.value)).value;
    let shift = if min_psi < 1.0 { 1.0 - min_psi } else { 0.0 };
    let diag = field.diagonal_drift(&vec![0.0; d]).is_some();
    let eval = |sp: &SamplePoint| -> Option<(f64, Option<f64>)> {
        let j = field.psi(&sp.x)?;
        let psi = j.value + shift;
        let l = psi.ln();
        if l < 1.0 {
            return None;
        }
        let qg = linalg::quad_form(&field.q(&sp.x), &j.grad);
        let c = qg / (psi * l).powi(2);
        let c1 = if diag {
            field.diagonal_drift(&sp.x).map(|b: DVector<f64>| -b.dot(&j.grad) / (psi * l))
        } else {
            None
        };
        Some((c, c1))
    };
    let c = sweep_max(spec, d, |sp| eval(sp).map(|e| e.0));
    let c1 = if diag { Some(sweep_max(spec, d, |sp| eval(sp).and_then(|e| e.1)).value.max(0.0)) } else { None };
    let counted = spec.points - c.skipped;
    let cv = if c.value.is_nan() { 0.0 } else { c.value };
    Ok(PsiGrowth { c: cv, c1, c2: cv, shift, counted })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtoileOutcome {
    pub ok: bool,
    pub worst_margin: f64,
    pub worst_point: Vec<f64>,
}

/// p⁻¹(div b)|ξ|² + ⟨Vξ,ξ⟩ ≥ 0 for diagonal drift Bⁱ = bᵢ I; the ξ-minimum is λ_min.
pub fn check_etoile0(field: &dyn CoefficientField, p: f64, spec: &SampleSpec) -> Result<EtoileOutcome> {
    let d = field.dim();
    let probe = spec.point(1.min(spec.points.saturating_sub(1)), d).x;
    if field.diagonal_drift(&probe).is_none() || field.diagonal_drift(&vec![0.0; d]).is_none() {
        return Err(Error::InvalidParameters("not applicable: drift is not diagonal".into()));
    }
    let r = sweep_min(spec, d, |sp| {
        let x = &sp.x;
        Some(field.div_diagonal_drift(x) / p + linalg::min_sym_eig(&field.vpot(x)))
    });
    Ok(EtoileOutcome { ok: r.value >= -1e-12 * (1.0 + r.value.abs()), worst_margin: r.value, worst_point: r.point })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lyapunov {
    pub lambda: f64,
    pub m_bound: Option<f64>,
    pub ok: bool,
}

/// λ = max (𝒜_v φ)/φ clipped at 0, and M = max 𝒜_v v when v has a coded Hessian.
pub fn lyapunov_check(field: &dyn CoefficientField, spec: &SampleSpec, cap: f64) -> Result<Lyapunov> {
    let d = field.dim();
    if field.phi(&vec![0.0; d]).is_none() {
        return Err(Error::Config("field has no Lyapunov function phi".into()));
    }
    let lam = sweep_max(spec, d, |sp| {
        let j = field.phi(&sp.x)?;
        apply_scalar_av(field, &sp.x, &j).map(|a| a / j.value)
    });
    let lambda = lam.value.max(0.0);
    let m_bound = if field.hess_v(&vec![0.0; d]).is_some() {
        let r = sweep_max(spec, d, |sp| {
            let x = &sp.x;
            let jv = crate::fields::ScalarJet { value: field.vscal(x), grad: field.grad_v(x), hess: field.hess_v(x) };
            apply_scalar_av(field, x, &jv)
        });
        Some(r.value)
    } else {
        None
    };
    let ok = lambda.is_finite() && lambda <= cap && m_bound.is_none_or(|m| m.is_finite() && m <= cap);
    Ok(Lyapunov { lambda, m_bound, ok })
}
