//! Command-line driver for the bimodal-cavity simulator.
//!
//! Every command prints a header block (tool version, resolved config, seed,
//! units) followed by a CSV or JSON table. Exit codes: 0 success, 1 internal
//! error or failed check, 2 invalid or infeasible input.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{ConfigArgs, Format, RunConfig};
pub use error::{CliError, EXIT_INPUT, EXIT_INTERNAL, EXIT_OK};
pub use output::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "bimodal", version, about = "Entangled-state generation in a bimodal cavity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run one protocol noiselessly and list the generated amplitudes.
    Protocol { name: String },
    /// Figure-ready parameter sweeps.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
    },
    /// Closed forms against direct propagation on random draws.
    Oracle {
        /// A family name or `all`.
        #[arg(default_value = "all")]
        family: String,
    },
    /// Atomic positions with equal coupling to modes n and n+1.
    Positions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Dissipation,
    Jitter,
    Sasa,
}

impl Command {
    pub fn execute(&self, cfg: &RunConfig) -> Result<commands::Outcome, CliError> {
        match self {
            Command::Protocol { name } => commands::protocol(name, cfg),
            Command::Sweep { kind } => match kind {
                SweepKind::Dissipation => commands::sweep_dissipation(cfg),
                SweepKind::Jitter => commands::sweep_jitter(cfg),
                SweepKind::Sasa => commands::sweep_sasa(cfg),
            },
            Command::Oracle { family } => commands::oracle(family, cfg),
            Command::Positions => commands::positions(cfg),
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = cli
        .config
        .resolve()
        .and_then(|cfg| cli.command.execute(&cfg))
        .and_then(|outcome| outcome.table.emit(stdout).map(|_| outcome.passed));
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "error: check failed, see the table for details");
            EXIT_INTERNAL
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
