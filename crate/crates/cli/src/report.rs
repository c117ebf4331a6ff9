//! `report`: aggregates a run directory into one deterministic summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::output::{manifest_path, write_atomic, write_csv, Manifest};
use crate::{Status, UsageError};

/// Condition ids emitted by `check`.
pub const CHECK_IDS: [&str; 15] = [
    "diffusion_elliptic",
    "drift_symmetric",
    "potential_positive",
    "potential_lower_bound",
    "potential_comparable",
    "drift_coupling",
    "oscillation",
    "psi_growth",
    "lyapunov",
    "growth_of_v",
    "theta_below_p",
    "generation_sub2",
    "generation_ge2",
    "scalar_domination",
    "core_potential_sign",
];

pub const COMMANDS: [&str; 5] = ["check", "optimize", "identities", "simulate", "verify"];

const OPTIMIZER_IDS: [&str; 4] = ["sub2_f2", "ge2_f2", "ge2_f1", "sub2_f1"];
const IDENTITY_IDS: [&str; 6] = ["form_bi", "form_q", "rdiss", "estv", "interpolation", "norm_equiv"];
const VERIFY_IDS: [&str; 8] =
    ["contraction", "monotone", "domination", "hypercontractive", "scheme_order", "scheme_gap", "resolvent_laplace", "nash"];

/// Every id the summary must list, grouped by the command that produces it.
pub fn coverage_ids() -> Vec<String> {
    let mut ids: Vec<String> = CHECK_IDS.iter().map(|s| format!("check.{s}")).collect();
    ids.extend(OPTIMIZER_IDS.iter().map(|s| format!("optimize.{s}")));
    ids.extend(IDENTITY_IDS.iter().map(|s| format!("identities.{s}")));
    ids.push("simulate.trajectory".into());
    ids.extend(VERIFY_IDS.iter().map(|s| format!("verify.{s}")));
    ids
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    Pass,
    Fail,
    NotApplicable,
    /// Produced but not among the config's requested `checks`.
    Skipped,
    Missing,
}

impl Coverage {
    fn label(self) -> &'static str {
        match self {
            Coverage::Pass => "pass",
            Coverage::Fail => "fail",
            Coverage::NotApplicable => "n/a",
            Coverage::Skipped => "skip",
            Coverage::Missing => "MISSING",
        }
    }

    fn ok(self) -> bool {
        matches!(self, Coverage::Pass | Coverage::NotApplicable | Coverage::Skipped)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageRow {
    pub id: String,
    pub status: Coverage,
    pub rows: usize,
    pub failed: usize,
    /// Smallest margin or slack over the rows, when the source has one.
    pub worst: Option<f64>,
}

#[derive(Default)]
struct Tally {
    rows: usize,
    failed: usize,
    applicable: usize,
    worst: Option<f64>,
    skipped: bool,
}

impl Tally {
    fn add(&mut self, ok: bool, applicable: bool, value: Option<f64>) {
        self.rows += 1;
        self.failed += usize::from(!ok);
        self.applicable += usize::from(applicable);
        if let Some(v) = value.filter(|v| !v.is_nan()) {
            self.worst = Some(self.worst.map_or(v, |w| w.min(v)));
        }
    }
}

type Tallies = BTreeMap<String, Tally>;

fn read_csv(path: &Path) -> Result<Vec<BTreeMap<String, String>>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(headers.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect());
    }
    Ok(rows)
}

fn field<'a>(row: &'a BTreeMap<String, String>, key: &str) -> &'a str {
    row.get(key).map_or("", String::as_str)
}

fn num(row: &BTreeMap<String, String>, key: &str) -> Option<f64> {
    field(row, key).parse().ok()
}

fn tally_check(dir: &Path, t: &mut Tallies, margins: &mut String) -> Result<()> {
    let text = fs::read_to_string(dir.join("check.json")).context("reading check.json")?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let rows = v["report"]["per_condition"].as_array().cloned().unwrap_or_default();
    let requested: Vec<&str> = v["requested"].as_array().map_or(vec![], |r| r.iter().filter_map(|x| x.as_str()).collect());
    writeln!(margins, "condition margins (check)")?;
    for r in rows {
        let id = r["id"].as_str().unwrap_or("?");
        let verdict = r["verdict"].as_str().unwrap_or("?");
        let margin = r["margin"].as_f64();
        let p = r["p"].as_f64().map_or("-".to_string(), |p| format!("{p}"));
        writeln!(margins, "  {id:<24} p={p:<6} {verdict:<14} margin={}", fmt_opt(margin))?;
        let ok = matches!(verdict, "pass" | "not_applicable");
        let entry = t.entry(format!("check.{id}")).or_default();
        entry.add(ok, verdict != "not_applicable", margin);
        entry.skipped = !requested.is_empty() && !requested.contains(&id);
    }
    Ok(())
}

fn tally_csv(dir: &Path, file: &str, cmd: &str, key: &str, value: &str, t: &mut Tallies) -> Result<()> {
    for row in read_csv(&dir.join(file))? {
        let name = field(&row, key);
        let name = name.split('(').next().unwrap_or(name);
        let ok = field(&row, "pass") == "true";
        t.entry(format!("{cmd}.{name}")).or_default().add(ok, true, num(&row, value));
    }
    Ok(())
}

fn tally_trajectory(dir: &Path, t: &mut Tallies) -> Result<()> {
    let entry = t.entry("simulate.trajectory".into()).or_default();
    for row in read_csv(&dir.join("trajectory.csv"))? {
        let norm = num(&row, "norm");
        entry.add(norm.is_some_and(f64::is_finite), true, None);
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.6e}"))
}

/// Builds the summary text and coverage table; also returns the aggregate status.
pub fn summarize(dir: &Path) -> Result<(String, Vec<CoverageRow>, Status)> {
    if !dir.is_dir() {
        return Err(UsageError(format!("run directory {} does not exist", dir.display())).into());
    }
    let mut manifests = Vec::new();
    for cmd in COMMANDS {
        let path = manifest_path(dir, cmd);
        if path.exists() {
            let m: Manifest = serde_json::from_str(&fs::read_to_string(&path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            manifests.push(m);
        }
    }
    if manifests.is_empty() {
        return Err(UsageError(format!("no manifest_*.json files in {}", dir.display())).into());
    }

    let mut t = Tallies::new();
    let mut margins = String::new();
    for m in &manifests {
        match m.command.as_str() {
            "check" => tally_check(dir, &mut t, &mut margins)?,
            "optimize" => tally_csv(dir, "optimize.csv", "optimize", "regime", "oracle_gap", &mut t)?,
            "identities" => tally_csv(dir, "identities.csv", "identities", "check", "value", &mut t)?,
            "simulate" => tally_trajectory(dir, &mut t)?,
            "verify" => tally_csv(dir, "verify.csv", "verify", "check", "slack", &mut t)?,
            _ => {}
        }
    }

    let mut ids = coverage_ids();
    ids.extend(t.keys().filter(|k| !ids.contains(k)).cloned().collect::<Vec<_>>());
    let table: Vec<CoverageRow> = ids
        .into_iter()
        .map(|id| match t.get(&id) {
            None => CoverageRow { id, status: Coverage::Missing, rows: 0, failed: 0, worst: None },
            Some(x) => {
                let status = if x.skipped {
                    Coverage::Skipped
                } else if x.failed > 0 {
                    Coverage::Fail
                } else if x.applicable == 0 {
                    Coverage::NotApplicable
                } else {
                    Coverage::Pass
                };
                CoverageRow { id, status, rows: x.rows, failed: x.failed, worst: x.worst }
            }
        })
        .collect();

    let ok = table.iter().all(|r| r.status.ok()) && manifests.iter().all(|m| m.status == Status::Pass);
    let status = Status::from_pass(ok);
    let mut s = String::new();
    writeln!(s, "lpgen run summary")?;
    for m in &manifests {
        let st = if m.status == Status::Pass { "pass" } else { "fail" };
        writeln!(s, "  {:<11} {st:<5} config={} hash={}", m.command, m.config_name, &m.config_hash[..12.min(m.config_hash.len())])?;
    }
    writeln!(s)?;
    writeln!(s, "coverage")?;
    for r in &table {
        writeln!(s, "  {:<32} {:<8} rows={:<5} failed={:<4} worst={}", r.id, r.status.label(), r.rows, r.failed, fmt_opt(r.worst))?;
    }
    if !margins.is_empty() {
        writeln!(s)?;
        s.push_str(&margins);
    }
    writeln!(s)?;
    writeln!(s, "overall: {}", if ok { "pass" } else { "fail" })?;
    Ok((s, table, status))
}

/// Writes summary.txt and coverage.csv into `dir` and returns the aggregate status.
pub fn run(dir: &Path) -> Result<(String, Status)> {
    let (text, table, status) = summarize(dir)?;
    write_atomic(&dir.join("summary.txt"), text.as_bytes())?;
    write_csv(&dir.join("coverage.csv"), &table)?;
    Ok((text, status))
}
