//! `umbrella`: derive, classify and numerically check the characteristic
//! foliation of a deformed Whitney umbrella.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "umbrella", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration (jet plus run settings).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Canonical-form field file; replaces the jet for diagram, classify
    /// and orbits.
    #[arg(long, global = true)]
    field: Option<PathBuf>,
    #[arg(long, global = true)]
    order: Option<i32>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Restrict output files to one format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Count an UNRESOLVED portrait as a verification failure.
    #[arg(long, global = true)]
    fail_on_unresolved: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Characteristic field and linear data of the configured jet.
    Derive,
    /// Newton diagram of the field.
    Diagram,
    /// Sector analysis and phase portrait.
    Classify,
    /// Export sampled orbits.
    Orbits,
    /// Golden fields, coefficient forms, Monte-Carlo and separatrix checks.
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Why a run stopped: bad input, or a check that did not hold.
pub enum Failure {
    Validation(anyhow::Error),
    Verification(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Validation(e.into())
    }
}

pub struct Context {
    pub config: RunConfig,
    pub field: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Context {
    /// Whether files of format `f` should be written.
    pub fn wants(&self, f: Format) -> bool {
        self.format.map_or(true, |g| g == f)
    }
}

fn context(cli: &Cli) -> anyhow::Result<Context> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.order {
        config.order = n;
    }
    if let Some(e) = cli.epsilon {
        config.epsilon = e;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(o) = &cli.out {
        config.out = o.clone();
    }
    config.fail_on_unresolved |= cli.fail_on_unresolved;
    config.validate()?;
    Ok(Context { config, field: cli.field.clone(), format: cli.format })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let ctx = context(cli)?;
    match cli.command {
        Command::Derive => commands::derive(&ctx),
        Command::Diagram => commands::diagram(&ctx),
        Command::Classify => commands::classify(&ctx),
        Command::Orbits => commands::orbits(&ctx),
        Command::Verify => commands::verify(&ctx),
    }
}

fn main() -> ExitCode {
    // Usage errors are validation failures; exit code 2 is reserved for
    // checks that did not hold.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
