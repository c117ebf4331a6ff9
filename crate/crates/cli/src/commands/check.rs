use std::path::Path;

use anyhow::Result;
use lpgen_core::admissibility::{build_report, AdmissibilityReport, ReportOptions, Verdict};
use lpgen_core::fields::{example1_constants, Example1Constants};
use serde::Serialize;

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::output::{finish, write_json};
use crate::Status;

#[derive(Serialize)]
struct CheckFile<'a> {
    schema_version: u32,
    config_name: &'a str,
    config_hash: String,
    /// Condition ids deciding the status (all when empty).
    requested: &'a [String],
    status: Status,
    example1: Option<Example1Constants>,
    report: &'a AdmissibilityReport,
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let field = cfg.build_field()?;
    let opts = ReportOptions { p_list: cfg.exponents.p_list.clone(), ..ReportOptions::default() };
    let report = build_report(field.as_ref(), &cfg.sampling.spec(), &opts)?;
    let example1 = match cfg.power_exp_params()? {
        Some(params) => Some(example1_constants(&params)?),
        None => None,
    };
    let pass = report
        .per_condition
        .iter()
        .filter(|c| cfg.checks.is_empty() || cfg.checks.contains(&c.id))
        .all(|c| matches!(c.verdict, Verdict::Pass | Verdict::NotApplicable));
    let status = Status::from_pass(pass);
    let file = CheckFile {
        schema_version: SCHEMA_VERSION,
        config_name: &cfg.name,
        config_hash: cfg.hash(),
        requested: &cfg.checks,
        status,
        example1,
        report: &report,
    };
    write_json(&out.join("check.json"), &file)?;
    finish(out, cfg, "check", status, vec!["check.json".into()])
}
