use std::path::Path;

use anyhow::Result;
use lpgen_core::admissibility::{pdis1_lhs, pdis_lhs};
use lpgen_core::optimizer::{sup_f1_ge2, sup_f1_sub2, sup_f2_ge2, sup_f2_sub2, OptimizerResult, Regime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{RunConfig, TupleConfig};
use crate::output::{finish, write_csv};
use crate::Status;

#[derive(Debug, Serialize)]
pub struct OptimizeRow {
    pub regime: &'static str,
    pub p: f64,
    pub theta: f64,
    pub kappa: f64,
    pub m: usize,
    pub gamma_cre: f64,
    pub closed_form: f64,
    pub condition: f64,
    pub exact_gap: f64,
    pub oracle: f64,
    pub oracle_gap: f64,
    /// Stationary point, ';'-separated.
    pub eps_star: String,
    pub pass: bool,
}

pub fn regime_id(r: Regime) -> &'static str {
    match r {
        Regime::Sub2F2 => "sub2_f2",
        Regime::Ge2F2 => "ge2_f2",
        Regime::Ge2F1 => "ge2_f1",
        Regime::Sub2F1 => "sub2_f1",
    }
}

/// Both objectives of the tuple's regime, each with the condition it should reproduce.
fn solve(t: &TupleConfig) -> lpgen_core::Result<Vec<(OptimizerResult, f64, f64)>> {
    let TupleConfig { p, theta, kappa, m, gamma_cre } = *t;
    Ok(if p < 2.0 {
        vec![
            (sup_f2_sub2(p, theta, kappa, m, gamma_cre)?, pdis_lhs(p, theta, kappa, m, gamma_cre)?, gamma_cre),
            (sup_f1_sub2(p, theta, kappa, m)?, pdis_lhs(p, theta, kappa, m, 0.0)?, 0.0),
        ]
    } else {
        vec![
            (sup_f2_ge2(p, theta, kappa, m, gamma_cre)?, pdis1_lhs(p, theta, kappa, m, gamma_cre)?, gamma_cre),
            (sup_f1_ge2(p, theta, kappa, m)?, pdis1_lhs(p, theta, kappa, m, 0.0)?, 0.0),
        ]
    })
}

fn random_tuples(cfg: &RunConfig) -> lpgen_core::Result<Vec<TupleConfig>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sampling.seed);
    let mut out = Vec::new();
    for (lo, hi) in [(1.05, 1.95), (2.0, 6.0)] {
        let mut kept = 0;
        let mut tries = 0;
        while kept < cfg.optimize.random_tuples && tries < 1000 * cfg.optimize.random_tuples.max(1) {
            tries += 1;
            let p = rng.random_range(lo..hi);
            let t = TupleConfig {
                p,
                theta: rng.random_range(0.0..p),
                kappa: rng.random_range(0.0..=2.0),
                m: rng.random_range(1..=5),
                gamma_cre: rng.random_range(0.0..=2.0),
            };
            if solve(&t)?.iter().all(|(r, _, _)| r.closed_form >= cfg.optimize.min_condition) {
                out.push(t);
                kept += 1;
            }
        }
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let o = &cfg.optimize;
    let mut tuples = o.tuples.clone();
    tuples.extend(random_tuples(cfg)?);
    let mut rows = Vec::new();
    for t in &tuples {
        for (r, condition, gamma_cre) in solve(t)? {
            let r = r.with_oracle(o.resolution)?;
            let exact_gap = (r.closed_form - condition).abs();
            let oracle = r.oracle_value.unwrap_or(f64::NAN);
            let oracle_gap = r.oracle_gap.unwrap_or(f64::NAN);
            rows.push(OptimizeRow {
                regime: regime_id(r.constants.regime),
                p: t.p,
                theta: t.theta,
                kappa: t.kappa,
                m: t.m,
                gamma_cre,
                closed_form: r.closed_form,
                condition,
                exact_gap,
                oracle,
                oracle_gap,
                eps_star: r.eps_star.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";"),
                pass: exact_gap <= 1e-12 * (1.0 + condition.abs()) && oracle_gap < o.oracle_tolerance,
            });
        }
    }
    write_csv(&out.join("optimize.csv"), &rows)?;
    let status = Status::from_pass(rows.iter().all(|r| r.pass));
    finish(out, cfg, "optimize", status, vec!["optimize.csv".into()])
}
