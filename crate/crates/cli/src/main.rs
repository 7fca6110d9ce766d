//! `fracweyl`: solve, spectrum, bounds, check and grid-dump subcommands.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a property check did not pass |
//! | 2 | usage error (bad flag, unknown property, malformed config) |
//! | 3 | invalid parameters |
//! | 4 | invalid or empty domain |
//! | 5 | operation requires p = 2 |
//! | 6 | upper bound requested with sp <= N |
//! | 7 | solver did not converge |
//! | 8 | I/O error |

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracweyl::Error;

use config::Settings;

#[derive(Debug, Parser)]
#[command(
    name = "fracweyl",
    version,
    about = "Fractional p-Laplacian Dirichlet eigenvalues and Weyl-type bounds"
)]
struct Cli {
    /// TOML config file; its values override command-line flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// First eigenpair by constrained Rayleigh minimization
    Solve {
        #[command(flatten)]
        settings: Settings,
    },
    /// Full spectrum (p = 2), counting function and Weyl slope fit
    Spectrum {
        #[command(flatten)]
        settings: Settings,
    },
    /// Two-sided counting-function bounds, optionally merged with a spectrum
    Bounds {
        #[command(flatten)]
        settings: Settings,
        /// Spectrum CSV (`k,lambda_k`) to merge as measured counts
        #[arg(long)]
        spectrum: Option<PathBuf>,
        /// Include the upper bound (default: only when sp > N)
        #[arg(long)]
        upper: bool,
    },
    /// Property checks, emitted as JSON lines
    Check {
        #[command(flatten)]
        settings: Settings,
        /// Comma-separated: scaling, monotonicity, sign_change, symmetry, simplicity, poincare
        /// [default: every property that applies to the domain and exponent]
        #[arg(long, value_delimiter = ',')]
        properties: Option<Vec<String>>,
        /// Scale all weights and the potential by this factor (fault injection)
        #[arg(long = "corrupt-weights", hide = true)]
        corrupt_weights: Option<f64>,
    },
    /// Grid nodes and complement potential as CSV
    GridDump {
        #[command(flatten)]
        settings: Settings,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Artifact(#[from] fracweyl::io::IoError),
    #[error("{0} check(s) did not pass")]
    CheckFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Model(e) | CliError::Artifact(fracweyl::io::IoError::Model(e)) => {
                model_code(e)
            }
            CliError::Io(_) | CliError::Artifact(_) => 8,
        }
    }
}

fn model_code(e: &Error) -> u8 {
    match e {
        Error::InvalidDomain(_) | Error::EmptyGrid | Error::NotNested(_) | Error::NotABall => 4,
        Error::WrongExponent(_) => 5,
        Error::SubcriticalExponent { .. } => 6,
        Error::NoConvergence { .. } => 7,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (file, extras) = match &cli.config {
        Some(path) => {
            let (s, e) = config::read_config(path)?;
            (Some(s), e)
        }
        None => Default::default(),
    };
    match cli.command {
        Command::Solve { settings } => {
            commands::solve(config::RunConfig::resolve("solve", settings, file)?)
        }
        Command::Spectrum { settings } => {
            commands::spectrum(config::RunConfig::resolve("spectrum", settings, file)?)
        }
        Command::Bounds {
            settings,
            spectrum,
            upper,
        } => {
            let cfg = config::RunConfig::resolve("bounds", settings, file)?;
            let upper = extras.upper.or(upper.then_some(true));
            commands::bounds(cfg, extras.spectrum.or(spectrum), upper)
        }
        Command::Check {
            settings,
            properties,
            corrupt_weights,
        } => {
            let cfg = config::RunConfig::resolve("check", settings, file)?;
            let names = extras
                .properties
                .or(properties)
                .unwrap_or_else(|| commands::applicable(&cfg));
            commands::check(cfg, &names, corrupt_weights)
        }
        Command::GridDump { settings } => {
            commands::grid_dump(config::RunConfig::resolve("grid-dump", settings, file)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracweyl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
