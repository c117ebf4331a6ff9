//! Output files: atomic writes and the per-command manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::Status;

/// Writes via a temporary sibling and a rename so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    write_atomic(path, &w.into_inner()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub config_name: String,
    pub config_hash: String,
    pub status: Status,
    pub files: Vec<String>,
}

pub fn manifest_path(dir: &Path, command: &str) -> PathBuf {
    dir.join(format!("manifest_{command}.json"))
}

/// Records the command's outputs and status, and stores the effective config next to them.
pub fn finish(dir: &Path, cfg: &RunConfig, command: &str, status: Status, files: Vec<String>) -> Result<Status> {
    let mut stored = cfg.clone();
    stored.output = None;
    write_json(&dir.join("config.json"), &stored)?;
    let m = Manifest {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        config_name: cfg.name.clone(),
        config_hash: cfg.hash(),
        status,
        files,
    };
    write_json(&manifest_path(dir, command), &m)?;
    Ok(status)
}
