use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;
mod report;

use args::{Cli, Command};
use config::{allowed_keys, FileConfig};

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => {
            file.check_known(&allowed_keys("ingest"))?;
            commands::cmd_ingest(a, &file)
        }
        Command::Synth(a) => {
            file.check_known(&allowed_keys("synth"))?;
            commands::cmd_synth(a, &file)
        }
        Command::Embed(a) => {
            file.check_known(&allowed_keys("embed"))?;
            commands::cmd_embed(a, &file)
        }
        Command::Evaluate(a) => {
            file.check_known(&allowed_keys("evaluate"))?;
            commands::cmd_evaluate(a, &file)
        }
        Command::SweepDim(a) => {
            file.check_known(&allowed_keys("sweep-dim"))?;
            commands::cmd_sweep_dim(a, &file)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
