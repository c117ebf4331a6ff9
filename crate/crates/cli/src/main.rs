#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use lpgen::config::RunConfig;
use lpgen::{commands, error_exit_code, report, Status};

#[derive(Parser)]
#[command(name = "lpgen", version, about = "Numerical laboratory for L^p generation conditions of elliptic systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides sampling.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config's `output`, default `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Clone, PartialEq)]
enum Command {
    /// Admissibility report for the configured field.
    Check,
    /// Closed forms against the grid oracle.
    Optimize,
    /// Integral identity and estimate checks on a random ensemble.
    Identities,
    /// Evolve the discretized problem and record norms.
    Simulate,
    /// Discrete contraction, domination and scheme checks.
    Verify,
    /// Summarize a run directory (defaults to --out).
    Report {
        #[arg(value_name = "RUN_DIR")]
        dir: Option<PathBuf>,
    },
}

fn load(cli: &Cli) -> Result<(RunConfig, PathBuf)> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| lpgen::UsageError("--config is required for this command".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.sampling.seed = seed;
        cfg.validate()?;
    }
    let out = cli.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| "out".into());
    Ok((cfg, out))
}

fn dispatch(cli: &Cli) -> Result<Status> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global()?;
    }
    if let Command::Report { dir } = &cli.command {
        let dir = dir.clone().or_else(|| cli.out.clone()).unwrap_or_else(|| "out".into());
        let (text, status) = report::run(&dir)?;
        print!("{text}");
        return Ok(status);
    }
    let (cfg, out) = load(cli)?;
    let status = match cli.command {
        Command::Check => commands::check(&cfg, &out)?,
        Command::Optimize => commands::optimize(&cfg, &out)?,
        Command::Identities => commands::identities(&cfg, &out)?,
        Command::Simulate => commands::simulate(&cfg, &out)?,
        Command::Verify => commands::verify(&cfg, &out)?,
        Command::Report { .. } => unreachable!(),
    };
    println!("{}: {}", out.display(), if status == Status::Pass { "pass" } else { "fail" });
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(s) => ExitCode::from(s.exit_code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}
