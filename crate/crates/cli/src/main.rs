//! `strichartz`: batch front end for the `strichartz` crate.
//!
//! Every command prints a JSON report on stdout. With `--out DIR` it also
//! writes the report, its CSV/JSON data files and a `manifest.json` into
//! `DIR`. All files are written atomically after the command succeeded.
//!
//! Exit codes: 2 bad input or parameters, 3 internal inconsistency, 4 no
//! threshold sign change, 5 conservation warning under `--strict`, 6 the
//! stability gate rejected the profile, 1 I/O failure.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use output::{to_json, write_atomic, RunManifest};

#[derive(Debug)]
pub enum CliError {
    Core(strichartz::Error),
    Input(String),
    Strict(String),
    Io(std::io::Error),
}

impl From<strichartz::Error> for CliError {
    fn from(e: strichartz::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use strichartz::Error::*;
        match self {
            CliError::Input(_) | CliError::Core(Parameter(_)) => 2,
            CliError::Core(Inconsistency { .. }) => 3,
            CliError::Core(NoSignChange { .. }) => 4,
            CliError::Strict(_) => 5,
            CliError::Core(ResidualGate { .. }) => 6,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Strict(m) => write!(f, "conservation check failed under --strict: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("STRICHARTZ_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("STRICHARTZ_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn run(cmd: &Command) -> Result<(), CliError> {
    configure_threads()?;
    let start = Instant::now();
    let outcome = match cmd {
        Command::Eval(a) => commands::eval(a),
        Command::Threshold(a) => commands::threshold(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Stability(a) => commands::stability(a),
    }?;
    if let Some(dir) = cmd.out() {
        outcome.artifacts.write(dir)?;
        let manifest = RunManifest {
            command: cmd.name(),
            config: cmd,
            seed: cmd.seed(),
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time: start.elapsed().as_secs_f64(),
        };
        write_atomic(dir, "manifest.json", &to_json(&manifest))?;
    }
    print!(
        "{}",
        String::from_utf8(to_json(&outcome.report)).expect("json is utf-8")
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
