//! `wfs`: runs configured checks and writes deterministic reports.

mod checks;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use checks::{Context, Outcome};
use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(
    name = "wfs",
    version,
    about = "Checks for weighted function spaces and kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Verify conditions (A), (C), (I), (II) of each referenced family.
    CheckFamily,
    /// Evaluate seminorms of a corpus.
    Seminorm,
    /// Derive norm-equivalence constants and test them on a corpus.
    Equivalence,
    /// Verify the dominating-measure bound.
    Nuclearity,
    /// Check differentiation under a functional.
    KernelDiff,
    /// Weighted separable approximation and singular-value decay.
    KernelDecompose,
    /// Run every check in the config.
    ReportAll,
}

impl Command {
    fn selects(self, type_name: &str) -> bool {
        let own = match self {
            Self::CheckFamily => "check-family",
            Self::Seminorm => "seminorm",
            Self::Equivalence => "equivalence",
            Self::Nuclearity => "nuclearity",
            Self::KernelDiff => "kernel-diff",
            Self::KernelDecompose => "kernel-decompose",
            Self::ReportAll => return true,
        };
        own == type_name
    }
}

#[derive(clap::Args)]
struct Flags {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance applied to every selected check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Also write `<name>.certificate.json` where a check produces one.
    #[arg(long, global = true)]
    emit_certificate: bool,
    /// Suppress per-check lines.
    #[arg(long, global = true)]
    quiet: bool,
}

fn run(cli: &Cli) -> Result<Vec<Outcome>, ConfigError> {
    let f = &cli.flags;
    let path = f
        .config
        .as_ref()
        .ok_or_else(|| ConfigError("--config is required".into()))?;
    if let Some(t) = f.tol {
        if !(t > 0.0) {
            return Err(ConfigError("--tol must be positive".into()));
        }
    }
    let config = RunConfig::load(path)?;
    let families = config.families()?;
    config.validate(&families)?;
    let selected: Vec<_> = config
        .checks
        .iter()
        .enumerate()
        .filter(|(_, c)| cli.command.selects(c.type_name()))
        .collect();
    if selected.is_empty() {
        return Err(ConfigError("no checks selected".into()));
    }
    let out = f.out.clone().or_else(|| config.output.clone());
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir).map_err(|e| {
            ConfigError(format!(
                "output directory {} is not writable: {e}",
                dir.display()
            ))
        })?;
    }
    let ctx = Context {
        config: &config,
        families: &families,
        tol_override: f.tol,
    };
    let mut outcomes = Vec::with_capacity(selected.len());
    for (i, check) in selected {
        let o = ctx.run(i, check)?;
        if !f.quiet {
            println!(
                "{} {} [{}]: {}",
                if o.passed { "PASS" } else { "FAIL" },
                o.name,
                o.kind,
                o.summary
            );
        }
        outcomes.push(o);
    }
    if let Some(dir) = out {
        report::write_all(&dir, &outcomes, f.emit_certificate)?;
    }
    Ok(outcomes)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(outcomes) if outcomes.iter().all(|o| o.passed) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
