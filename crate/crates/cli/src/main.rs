//! `horohopf`: command-line runner for Hopf decomposition and horospheric limit set experiments.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "horohopf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Hopf partitions and recurrence checks of countable weighted actions.
    ErgodicLab,
    /// Conservative/dissipative labels for boundary points.
    Classify,
    /// Poincare series partial sums along a radius schedule.
    Series,
    /// Monte Carlo estimate of the conservative part of the boundary measure.
    HopfMass,
    /// Empirical hyperbolicity constant and Busemann defects of a model.
    DeltaCheck,
    /// Quasi-conformality audit of a boundary stream.
    AuditStream,
    /// Stallings core graph of a finitely generated subgroup of a free group.
    Fold,
}

#[derive(Args)]
pub struct Flags {
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Caps the radius schedule (or search depth, ball radius).
    #[arg(long, global = true)]
    radius_max: Option<f64>,
}

impl Flags {
    fn config(&self) -> Result<&PathBuf, CliError> {
        self.config
            .as_ref()
            .ok_or_else(|| CliError::Config("--config is required".into()))
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Invariant(String),
    Audit(String),
}

impl From<horohopf_core::Error> for CliError {
    fn from(e: horohopf_core::Error) -> Self {
        use horohopf_core::Error as E;
        match e {
            E::InvariantViolation(_) | E::DecisionConflict(_) | E::NumericDegeneracy(_) | E::Overflow(_) => {
                CliError::Invariant(e.to_string())
            }
            E::StreamAudit(_) => CliError::Audit(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::Audit(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Invariant(m) | CliError::Audit(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::ErgodicLab => commands::ergodic_lab,
        Command::Classify => commands::classify,
        Command::Series => commands::series,
        Command::HopfMass => commands::hopf_mass,
        Command::DeltaCheck => commands::delta_check,
        Command::AuditStream => commands::audit_stream,
        Command::Fold => commands::fold,
    };
    match run(&cli.flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
