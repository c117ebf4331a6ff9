#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Command implementations for the `lpgen` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

use std::fmt;

/// Configuration or usage problem; the binary exits with status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

/// Exit code for an error: 2 for configuration or usage problems, 1 otherwise.
pub fn error_exit_code(err: &anyhow::Error) -> u8 {
    let usage = err.chain().any(|e| {
        e.downcast_ref::<UsageError>().is_some()
            || matches!(
                e.downcast_ref::<lpgen_core::Error>(),
                Some(lpgen_core::Error::Config(_) | lpgen_core::Error::InvalidParameters(_))
            )
    });
    if usage {
        2
    } else {
        1
    }
}
