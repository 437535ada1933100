//! Command-line front end: layered configuration, the `ode`, `simulate`,
//! `figure1`, `figure2` and `check` commands, and CSV output.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;

pub use args::{Cli, Command};
pub use config::ExperimentConfig;
pub use error::CliError;

/// Run one parsed command, writing the human-readable summary to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Ode(a) => commands::cmd_ode(&a.resolve(2000.0)?, out),
        Command::Simulate(a) => commands::cmd_simulate(&a.resolve(2000.0)?, out),
        Command::Figure1(a) => commands::cmd_figure1(&a.resolve(2000.0)?, out),
        Command::Figure2(a) => commands::cmd_figure2(&a.resolve(1900.0)?, out),
        Command::Check(a) => commands::cmd_check(a, out),
    }
}
