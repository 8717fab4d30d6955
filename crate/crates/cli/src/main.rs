mod args;
mod commands;
mod config;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::FileConfig;

/// Bad flags, config values or inputs; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Result of a subcommand that processes records one by one.
#[derive(Debug, Default)]
pub struct Outcome {
    pub failures: usize,
}

const EXIT_RECORD_FAILURES: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) if outcome.failures == 0 => ExitCode::SUCCESS,
        Ok(outcome) => {
            eprintln!("tdm: {} record(s) failed; see the failures file beside the output", outcome.failures);
            ExitCode::from(EXIT_RECORD_FAILURES)
        }
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("tdm: usage error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("tdm: error: {e:#}");
            ExitCode::from(EXIT_RECORD_FAILURES)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let jobs = config::pick(file.jobs, cli.jobs, 0);
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    match cli.command {
        Command::Ingest(a) => commands::ingest::run(a, &file),
        Command::BuildCorpus(a) => commands::corpus::run(a, &file),
        Command::Predict(a) => commands::predict::run(a, &file),
        Command::Evaluate(a) => commands::evaluate::run(a, &file),
        Command::Export(a) => commands::export::run(a, &file),
        Command::Stats(a) => commands::stats::run(a),
    }
}
