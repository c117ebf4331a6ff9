use std::path::Path;

use anyhow::Result;
use lpgen_core::admissibility::{estimate_kappa, estimate_theta};
use lpgen_core::fields::example1_constants;
use lpgen_core::identities::*;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{finish, write_csv};
use crate::{Status, UsageError};

#[derive(Debug, Serialize)]
pub struct IdentityRow {
    pub check: &'static str,
    pub seed: u64,
    pub p: f64,
    pub eps: Option<f64>,
    pub value: f64,
    pub pass: bool,
}

/// Sector constant per p from the ε selection, with θ and κ from the family bounds when known.
fn sector_constants(cfg: &RunConfig, field: &dyn lpgen_core::fields::CoefficientField) -> Result<Vec<f64>> {
    if let Some(c) = cfg.identities.sector_constant {
        return Ok(vec![c; cfg.exponents.p_list.len()]);
    }
    let spec = cfg.sampling.spec();
    let theta = match field.theta_bound() {
        Some(t) => t,
        None => estimate_theta(field, &spec)?.value,
    };
    let mut kappa = estimate_kappa(field, &spec)?.value;
    if let Some(params) = cfg.power_exp_params()? {
        kappa = kappa.max(example1_constants(&params)?.a0);
    }
    cfg.exponents
        .p_list
        .iter()
        .map(|&p| {
            rdiss_constant(p, theta, kappa, field.components(), cfg.identities.gamma_cre, cfg.c1()).map_err(|e| {
                UsageError(format!(
                    "no sector constant at p = {p} ({e}); set identities.sector_constant to check against a given C"
                ))
                .into()
            })
        })
        .collect()
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let field = cfg.build_field()?;
    let (d, m) = (field.dim(), field.components());
    let ic = &cfg.identities;
    let grid = QuadratureGrid::covering(d, ic.radius, ic.nodes)?;
    let constants = sector_constants(cfg, field.as_ref())?;
    let per_draw: Vec<Vec<IdentityRow>> = (0..ic.ensemble as u64)
        .into_par_iter()
        .map(|k| -> lpgen_core::Result<Vec<IdentityRow>> {
            let seed = cfg.sampling.seed + k;
            let mut rows = Vec::new();
            let draw = FormDraw::random(seed, d, m, ic.radius);
            let bi = verify_form_bi(field.as_ref(), &draw.u, &draw.eta, draw.eps, draw.p, &grid)?;
            rows.push(IdentityRow {
                check: "form_bi",
                seed,
                p: draw.p,
                eps: Some(draw.eps),
                value: bi.residual,
                pass: bi.residual < ic.form_bi_tolerance,
            });
            let fq = verify_form_q(field.as_ref(), &draw.u, draw.eps, draw.p, &grid)?;
            rows.push(IdentityRow {
                check: "form_q",
                seed,
                p: draw.p,
                eps: Some(draw.eps),
                value: fq.slack,
                pass: fq.slack >= -ic.form_q_tolerance,
            });
            let u = make_complex_bump(seed, d, m, ic.radius, ic.richness);
            for (&p, &c) in cfg.exponents.p_list.iter().zip(&constants) {
                for &eps in &ic.eps_list {
                    let r = check_rdiss(field.as_ref(), &u, p, eps, c, &grid)?;
                    rows.push(IdentityRow {
                        check: "rdiss",
                        seed,
                        p,
                        eps: Some(eps),
                        value: c * r.re_part - r.im_part,
                        pass: r.holds,
                    });
                }
                let ratio = check_estv(field.as_ref(), &u, p, &grid)?;
                rows.push(IdentityRow { check: "estv", seed, p, eps: None, value: ratio, pass: ratio.is_finite() });
                for (eps, k) in check_interpolation(field.as_ref(), &u, p, &ic.eps_list, &grid)? {
                    rows.push(IdentityRow { check: "interpolation", seed, p, eps: Some(eps), value: k, pass: k.is_finite() });
                }
                let ne = check_norm_equiv(field.as_ref(), &u, p, &grid)?;
                rows.push(IdentityRow {
                    check: "norm_equiv",
                    seed,
                    p,
                    eps: None,
                    value: ne.ratio,
                    pass: ne.ratio.is_finite() && ne.ratio > 0.0,
                });
            }
            Ok(rows)
        })
        .collect::<lpgen_core::Result<_>>()?;
    let rows: Vec<IdentityRow> = per_draw.into_iter().flatten().collect();
    write_csv(&out.join("identities.csv"), &rows)?;
    let status = Status::from_pass(rows.iter().all(|r| r.pass));
    finish(out, cfg, "identities", status, vec!["identities.csv".into()])
}
