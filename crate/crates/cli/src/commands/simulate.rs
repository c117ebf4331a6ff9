use std::path::Path;

use anyhow::Result;
use lpgen_core::discrete::{assemble, evolve};
use serde::Serialize;

use super::{grid, initial};
use crate::config::RunConfig;
use crate::output::{finish, write_atomic, write_csv};
use crate::Status;

#[derive(Serialize)]
struct Row {
    t: f64,
    p: String,
    norm: f64,
    scheme: &'static str,
    dt: f64,
    h: f64,
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let field = cfg.build_field()?;
    let g = grid(cfg, field.dim())?;
    let op = assemble(field.as_ref(), &g)?;
    let f = initial(cfg, &g, field.components());
    let mut rows = Vec::new();
    let mut files = vec!["trajectory.csv".to_string()];
    for &scheme in &cfg.time.schemes {
        let traj = evolve(&op, &f, cfg.time.horizon, cfg.time.dt, scheme, &cfg.exponents.p_list, &cfg.time.snapshots)?;
        for (t, p, norm, scheme, dt, h) in traj.csv_rows() {
            rows.push(Row { t, p, norm, scheme, dt, h });
        }
        for (k, (t, u)) in traj.snapshots.iter().enumerate() {
            let name = format!("snapshots/{}_{k:03}.txt", scheme.id());
            write_atomic(&out.join(&name), u.to_text(*t).as_bytes())?;
            files.push(name);
        }
    }
    write_csv(&out.join("trajectory.csv"), &rows)?;
    finish(out, cfg, "simulate", Status::Pass, files)
}
