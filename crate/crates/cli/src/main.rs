//! `bitdensity`: detector parameters, theory curves and Monte-Carlo tables.
//!
//! Exit status: 0 on success, 2 for invalid configuration, 3 for a
//! numerical failure.

mod commands;
mod config;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Command, RunSettings};
use config::{FileConfig, Format, OneOrMany};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] bitdensity::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bitdensity",
    version,
    about = "Bit density detection with window comparators"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed [default: config value, else 1].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo trials per hypothesis; 0 validates and prints the plan.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Run the unquantized energy detector on the same samples.
    #[arg(long, global = true)]
    paired_baseline: bool,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Threshold, randomization weight and null success rate.
    Params {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p_f: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Detection probability against false-alarm rate.
    Roc,
    /// Detection probability over the window width, per variance ratio.
    SweepC,
    /// Jamming detection in massive-MIMO uplink training.
    SimMimo,
    /// Transmitter detection by a network of one-bit sensors.
    SimWsn,
    /// Gaussian model with bits sent over a binary symmetric channel.
    SimBsc,
}

const DEFAULT_TRIALS: u64 = 10_000;

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            FileConfig::parse(&text)?
        }
        None => FileConfig::default(),
    };
    let command = match cli.command {
        Sub::Params { n, p_f, c } => {
            if let Some(n) = n {
                cfg.params.n = OneOrMany::One(n);
            }
            if let Some(p_f) = p_f {
                cfg.params.p_f = OneOrMany::One(p_f);
            }
            if let Some(c) = c {
                cfg.params.c = c;
            }
            Command::Params
        }
        Sub::Roc => Command::Roc,
        Sub::SweepC => Command::SweepC,
        Sub::SimMimo => Command::SimMimo,
        Sub::SimWsn => Command::SimWsn,
        Sub::SimBsc => Command::SimBsc,
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(1);
    let settings = RunSettings {
        trials: cli.trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS),
        paired_baseline: cli.paired_baseline || cfg.paired_baseline.unwrap_or(false),
    };
    let format = cli.format.or(cfg.format).unwrap_or_default();

    let (meta, table) = commands::execute(command, &cfg, seed, settings)?;
    let text = table::render(&meta, &table, format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            context: format!("cannot write {}", path.display()),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                context: "cannot write to stdout".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bitdensity: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
