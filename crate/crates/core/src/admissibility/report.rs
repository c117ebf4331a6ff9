use serde::Serialize;

use super::conditions::{admissible_p_set, cb_conditions, cubic_analysis, regime_lhs, CubicAnalysis};
use super::estimates::*;
use super::sampling::{sweep_max, sweep_min, SampleSpec};
use crate::error::Result;
use crate::fields::CoefficientField;
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Boundary,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict {
    pub id: String,
    pub p: Option<f64>,
    pub verdict: Verdict,
    pub margin: f64,
    pub worst_point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportOptions {
    pub p_list: Vec<f64>,
    pub gamma_cap: f64,
    /// Values above this count as "not finite" for the finiteness checks.
    pub cap: f64,
    pub p_range: (f64, f64),
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { p_list: vec![2.0], gamma_cap: 0.01, cap: 1e12, p_range: (1.01, 10.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub field: String,
    pub sampling: SampleSpec,
    pub kappa_hat: f64,
    pub theta_hat: f64,
    /// θ used by the conditions: the family's closed-form bound when it has one, else theta_hat.
    pub theta_used: f64,
    pub gamma_cre_hat: f64,
    pub c_gamma_hat: f64,
    pub crev_frontier: Vec<(f64, f64)>,
    pub new_k_frontier: Vec<(f64, f64)>,
    pub c0_inf_hat: f64,
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub psi_growth_hat: f64,
    pub c1_beta_hat: Option<f64>,
    pub c2_beta_hat: f64,
    pub lyapunov_lambda: f64,
    pub lyapunov_m: Option<f64>,
    pub etoile0_ok: Option<bool>,
    pub cubic: CubicAnalysis,
    pub admissible_intervals: Vec<(f64, f64)>,
    pub skipped_samples: usize,
    pub per_condition: Vec<ConditionVerdict>,
}

impl AdmissibilityReport {
    pub fn all_pass(&self) -> bool {
        self.per_condition
            .iter()
            .all(|c| matches!(c.verdict, Verdict::Pass | Verdict::NotApplicable))
    }

    pub fn verdict(&self, id: &str, p: Option<f64>) -> Option<Verdict> {
        self.per_condition.iter().find(|c| c.id == id && c.p == p).map(|c| c.verdict)
    }
}

fn positive(id: &str, p: Option<f64>, margin: f64, worst_point: Vec<f64>) -> ConditionVerdict {
    let verdict = if !margin.is_finite() {
        Verdict::Fail
    } else if margin.abs() <= 1e-12 {
        Verdict::Boundary
    } else if margin > 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    ConditionVerdict { id: id.to_string(), p, verdict, margin, worst_point }
}

fn nonneg(id: &str, p: Option<f64>, margin: f64, worst_point: Vec<f64>) -> ConditionVerdict {
    let verdict = if margin.is_finite() && margin >= -1e-12 { Verdict::Pass } else { Verdict::Fail };
    ConditionVerdict { id: id.to_string(), p, verdict, margin, worst_point }
}

pub fn build_report(field: &dyn CoefficientField, spec: &SampleSpec, opts: &ReportOptions) -> Result<AdmissibilityReport> {
    let d = field.dim();
    let m = field.components();
    let mut per = Vec::new();

    let mu = sweep_min(spec, d, |sp| Some(linalg::min_sym_eig(&field.q(&sp.x))));
    per.push(positive("diffusion_elliptic", None, mu.value, mu.point.clone()));

    let asym = sweep_max(spec, d, |sp| {
        Some(field.b(&sp.x).iter().map(|b| (b - b.transpose()).amax()).fold(0.0, f64::max))
    });
    per.push(nonneg("drift_symmetric", None, -asym.value, asym.point.clone()));

    let c0 = sweep_min(spec, d, |sp| Some(field.vscal(&sp.x)));
    per.push(positive("potential_positive", None, c0.value, c0.point.clone()));

    let lower = sweep_min(spec, d, |sp| {
        let v = field.vscal(&sp.x);
        Some((linalg::min_sym_eig(&field.vpot(&sp.x)) - v) / v)
    });
    per.push(nonneg("potential_lower_bound", None, lower.value, lower.point.clone()));

    let c1 = sweep_max(spec, d, |sp| Some(linalg::op_norm(&field.vpot(&sp.x)) / field.vscal(&sp.x)));
    per.push(positive("potential_comparable", None, opts.cap - c1.value, c1.point.clone()));

    let kappa = estimate_kappa(field, spec)?;
    per.push(positive("drift_coupling", None, opts.cap - kappa.value, kappa.point.clone()));
    let theta = estimate_theta(field, spec)?;
    let theta_used = field.theta_bound().map_or(theta.value, |t| t.max(theta.value));

    let osc = check_oscillation(field, spec, opts.cap);
    per.push(positive("oscillation", None, opts.cap - osc.c2, vec![]));

    let psi = check_psi_growth(field, spec)?;
    per.push(positive("psi_growth", None, opts.cap - psi.c, vec![]));

    let lyap = lyapunov_check(field, spec, opts.cap)?;
    per.push(positive("lyapunov", None, if lyap.ok { 1.0 } else { -1.0 }, vec![]));

    let gammas = log_grid(opts.gamma_cap.max(1e-8), 24);
    let mut gamma_fit = None;
    let mut etoile_all = None;
    for &p in &opts.p_list {
        let fit = fit_crev(field, spec, p, &gammas, opts.gamma_cap);
        per.push(positive("growth_of_v", Some(p), opts.cap - fit.c_gamma, vec![]));
        per.push(positive("theta_below_p", Some(p), p - theta_used, theta.point.clone()));
        let gen_id = if p < 2.0 { "generation_sub2" } else { "generation_ge2" };
        let g = regime_lhs(p, theta_used, kappa.value, m, fit.gamma).unwrap_or(f64::NAN);
        per.push(positive(gen_id, Some(p), g, vec![]));
        // κ̂ carries round-off; the condition is non-strict, so compare with a 1e-12 slack.
        let margin = if p >= 2.0 {
            (2.0 / m as f64).sqrt() - kappa.value
        } else {
            4.0 * (p - 1.0).powi(2) - p * kappa.value.powi(2) * m as f64
        };
        let mut cb = nonneg("scalar_domination", Some(p), margin, kappa.point.clone());
        if cb_conditions(p, kappa.value, m) {
            cb.verdict = Verdict::Pass;
        }
        per.push(cb);
        match check_etoile0(field, p, spec) {
            Ok(e) => {
                etoile_all = Some(etoile_all.unwrap_or(true) && e.ok);
                per.push(nonneg("core_potential_sign", Some(p), e.worst_margin, e.worst_point));
            }
            Err(_) => per.push(ConditionVerdict {
                id: "core_potential_sign".into(),
                p: Some(p),
                verdict: Verdict::NotApplicable,
                margin: 0.0,
                worst_point: vec![],
            }),
        }
        if gamma_fit.is_none() {
            gamma_fit = Some(fit);
        }
    }
    let fit = gamma_fit.unwrap_or_else(|| fit_crev(field, spec, 2.0, &gammas, opts.gamma_cap));

    let kappas: Vec<f64> = (0..=20).map(|k| kappa.value * k as f64 / 10.0).collect();
    let new_k = fit_new_k(field, spec, &kappas);
    let cubic = cubic_analysis(theta_used, kappa.value, m);
    let admissible_intervals =
        admissible_p_set(theta_used, kappa.value, m, fit.gamma, opts.p_range.0, opts.p_range.1)?;

    Ok(AdmissibilityReport {
        field: field.label(),
        sampling: *spec,
        kappa_hat: kappa.value,
        theta_hat: theta.value,
        theta_used,
        gamma_cre_hat: fit.gamma,
        c_gamma_hat: fit.c_gamma,
        crev_frontier: fit.frontier,
        new_k_frontier: new_k,
        c0_inf_hat: c0.value,
        c1_hat: c1.value,
        c2_hat: osc.c2,
        psi_growth_hat: psi.c,
        c1_beta_hat: psi.c1,
        c2_beta_hat: psi.c2,
        lyapunov_lambda: lyap.lambda,
        lyapunov_m: lyap.m_bound,
        etoile0_ok: etoile_all,
        cubic,
        admissible_intervals,
        skipped_samples: kappa.skipped + theta.skipped,
        per_condition: per,
    })
}
