//! Command-line front end for `sigchange`: configuration, CSV/JSON output,
//! SVG figures and the verification suite.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;
pub mod verify;

pub use commands::Artifacts;
pub use config::RunConfig;

use anyhow::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Field,
    Verify,
    Geodesic,
    Radical,
    Trap,
    Seam,
}

/// Runs a subcommand without writing anything.
pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Artifacts> {
    match cmd {
        Command::Field => commands::cmd_field(cfg),
        Command::Verify => commands::cmd_verify(cfg).map(|(a, _)| a),
        Command::Geodesic => commands::cmd_geodesic(cfg),
        Command::Radical => commands::cmd_radical(cfg),
        Command::Trap => commands::cmd_trap(cfg),
        Command::Seam => commands::cmd_seam(cfg),
    }
}
