//! Command-line drivers for the holonomy toolkit.
//!
//! Each subcommand resolves an [`ExperimentConfig`], runs one experiment and
//! writes a table as CSV or JSON. Exit codes: 0 on success, 1 for config
//! errors, 2 when every trial failed to measure.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};

pub use config::{Command, ExperimentConfig, FileConfig, Flags, Format};
pub use error::CliError;
use experiments::is_measurement_failure;
use output::Table;

#[derive(Parser, Debug)]
#[command(name = "holonomy", version, about = "Chern number, Zak phase and EGP experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// Chern number per (mu, trial).
    Chern(Flags),
    /// Fraction of wrong Chern numbers over an eps1 sweep.
    MistakeRatio(Flags),
    /// Integer field n(k) of one trial.
    Nfield(Flags),
    /// Zak phase profile over ky and its winding.
    Zak(Flags),
    /// Ensemble geometric phase profile over ky and its winding.
    Egp(Flags),
}

impl Sub {
    fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::Chern(f) => (Command::Chern, f),
            Sub::MistakeRatio(f) => (Command::MistakeRatio, f),
            Sub::Nfield(f) => (Command::Nfield, f),
            Sub::Zak(f) => (Command::Zak, f),
            Sub::Egp(f) => (Command::Egp, f),
        }
    }
}

/// A finished experiment: the table plus per-trial warnings.
pub struct Report {
    pub table: Table,
    pub warnings: Vec<String>,
    pub all_failed: bool,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut warnings = Vec::new();
    let (table, all_failed) = match cfg.command {
        Command::Chern => {
            let trials = experiments::run_chern(cfg)?;
            for t in &trials {
                if let Err(e) = &t.outcome {
                    warnings.push(format!("mu={} trial={}: {e}", t.mu, t.trial));
                }
            }
            let failed = trials
                .iter()
                .all(|t| matches!(&t.outcome, Err(e) if is_measurement_failure(e)));
            (output::chern_table(&trials), failed)
        }
        Command::MistakeRatio => {
            let rows = experiments::run_mistake_ratio(cfg)?;
            for r in &rows {
                for (trial, o) in r.outcomes.iter().enumerate() {
                    if let Err(e) = o {
                        warnings.push(format!("eps1={} trial={trial}: {e}", r.eps1));
                    }
                }
            }
            // Failed trials are what this command counts, not an error.
            (output::mistake_table(&rows), false)
        }
        Command::Nfield => (output::nfield_table(&experiments::run_nfield(cfg)?), false),
        Command::Zak | Command::Egp => {
            let (trials, column) = if cfg.command == Command::Zak {
                (experiments::run_zak(cfg)?, "phi")
            } else {
                (experiments::run_egp(cfg)?, "phiE")
            };
            for t in &trials {
                if let Err(e) = &t.winding {
                    warnings.push(format!("trial={}: {e}", t.trial));
                }
            }
            let failed = trials.iter().all(|t| t.failed());
            (output::phase_table(&trials, column), failed)
        }
    };
    Ok(Report { table, warnings, all_failed })
}

fn run_config(cfg: &ExperimentConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let report = execute(cfg)?;
    for w in &report.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    match &cfg.out {
        Some(path) => {
            let mut buf = Vec::new();
            report.table.write(cfg, &mut buf)?;
            std::fs::write(path, buf)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        None => report.table.write(cfg, &mut *stdout)?,
    }
    if report.all_failed {
        return Err(CliError::Measurement("no trial produced a measurement".into()));
    }
    Ok(())
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let (command, flags) = cli.command.split();
    let result = ExperimentConfig::resolve(command, flags).and_then(|cfg| run_config(&cfg, stdout, stderr));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
