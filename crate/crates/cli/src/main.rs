mod args;
mod commands;
mod config;
mod ingest;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{Cli, Command, Format};
use config::FileConfig;

const THREADS_VAR: &str = "TE_THREADS";

fn configure_threads(flag: Option<usize>, config: Option<usize>) -> Result<()> {
    let env = match std::env::var(THREADS_VAR) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("{THREADS_VAR}={v:?}"))?,
        ),
        Err(_) => None,
    };
    if let Some(threads) = flag.or(config).or(env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = FileConfig::load(cli.config.as_deref())?;
    configure_threads(cli.threads, config.threads)?;
    let format = cli.format.or(config.format);
    let text = match &cli.command {
        Command::Estimate(a) => commands::render(
            &commands::estimate(a, &config)?,
            format.unwrap_or(Format::Json),
        )?,
        Command::Test(a) => {
            commands::render(&commands::test(a, &config)?, format.unwrap_or(Format::Json))?
        }
        Command::SelectOrder(a) => commands::render(
            &commands::select(a, &config)?,
            format.unwrap_or(Format::Json),
        )?,
        Command::Simulate(a) => {
            if format == Some(Format::Json) {
                bail!("simulate writes CSV only");
            }
            commands::simulate(a, &config)?
        }
        Command::Calibrate(a) => commands::calibrate(a, &config, format.unwrap_or(Format::Json))?,
    };
    commands::emit(&text, cli.output.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("te: error: {message}");
            ExitCode::FAILURE
        }
    }
}
