//! Command-line front end of `gvlab-core`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod reproduce;
pub mod svg;

use args::{Cli, Command, MellinCommand};
use config::RunConfig;
pub use error::{CliError, Result};
pub use report::{Check, Report};

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<Report> {
    let list = || Report {
        lines: commands::catalog_lines(),
        ..Report::default()
    };
    if cli.list {
        return Ok(list());
    }
    match cli.command {
        None => Err(CliError::Usage(
            "no subcommand given; try --help or --list".into(),
        )),
        Some(Command::List) => Ok(list()),
        Some(Command::Solve(a)) => commands::cmd_solve(&RunConfig::for_solve(&a)),
        Some(Command::Analyze(a)) => commands::cmd_analyze(&RunConfig::for_analyze(&a)),
        Some(Command::Sequence(a)) => commands::cmd_sequence(&RunConfig::for_sequence(&a)),
        Some(Command::Selftest(a)) => commands::cmd_selftest(&RunConfig::for_selftest(&a)),
        Some(Command::Mellin(MellinCommand::Eval(a))) => {
            commands::cmd_mellin_eval(&RunConfig::for_mellin_eval(&a))
        }
        Some(Command::Mellin(MellinCommand::Zeros(a))) => {
            commands::cmd_mellin_zeros(&RunConfig::for_mellin_zeros(&a))
        }
        Some(Command::Reproduce(a)) => {
            reproduce::cmd_reproduce(&RunConfig::for_reproduce(&a), a.target)
        }
    }
}
