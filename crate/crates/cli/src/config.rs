//! Run configuration: command-line flags merged with an optional TOML file.
//! Values from the file override flags; flags override built-in defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use fracweyl::{DomainSpec, FracParams, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_DOMAIN: &str = "interval:0,1";

/// Settings shared by every subcommand. Each is optional so that the config
/// file can fill gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Settings {
    /// Domain, e.g. `interval:0,1`, `box:0,0;1,0.5`, `ball:0,0;1`, `cubes:0.5;0,0;0.5,0`
    #[arg(long)]
    pub domain: Option<DomainField>,
    /// Fractional order, 0 < s < 1 [default: 0.5]
    #[arg(long)]
    pub s: Option<f64>,
    /// Integrability exponent, p > 1 [default: 2]
    #[arg(long)]
    pub p: Option<f64>,
    /// Lattice resolution: cells across the longest bounding-box side [default: 64]
    #[arg(long)]
    pub n: Option<usize>,
    /// Solver stall tolerance on the Rayleigh quotient [default: 1e-14]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Solver iteration budget [default: 200000]
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// Seed for random starts and samples [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dilation factor for the scaling check [default: 2]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Unit-cube calibration level [default: discrete unit-cube first eigenvalue]
    #[arg(long)]
    pub lambda0: Option<f64>,
    /// Lower calibration integer [default: 1]
    #[arg(long)]
    pub r: Option<u64>,
    /// Upper calibration integer [default: r]
    #[arg(long)]
    pub q: Option<u64>,
    /// Eigenvalue window `LO,HI`
    #[arg(long = "lambda-window", value_parser = parse_window)]
    pub lambda_window: Option<Window>,
    /// Output directory for artifacts [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window(pub f64, pub f64);

fn parse_window(text: &str) -> Result<Window, String> {
    let (a, b) = text.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo > 0.0 && hi > lo) {
        return Err("window needs 0 < LO < HI".into());
    }
    Ok(Window(lo, hi))
}

/// A domain given either in the short text grammar or as a TOML table.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DomainField {
    Text(String),
    Spec(DomainSpec),
}

impl std::str::FromStr for DomainField {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(Self::Text(s.to_string()))
    }
}

impl DomainField {
    fn resolve(&self) -> fracweyl::Result<DomainSpec> {
        let spec = match self {
            Self::Text(t) => t.parse()?,
            Self::Spec(d) => d.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Command-specific keys accepted in the config file.
#[derive(Debug, Clone, Default)]
pub struct FileExtras {
    pub properties: Option<Vec<String>>,
    pub spectrum: Option<PathBuf>,
    pub upper: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    domain: Option<DomainField>,
    s: Option<f64>,
    p: Option<f64>,
    n: Option<usize>,
    tol: Option<f64>,
    max_iters: Option<usize>,
    seed: Option<u64>,
    tau: Option<f64>,
    lambda0: Option<f64>,
    r: Option<u64>,
    q: Option<u64>,
    lambda_window: Option<Window>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    properties: Option<Vec<String>>,
    spectrum: Option<PathBuf>,
    upper: Option<bool>,
}

impl ConfigFile {
    fn split(self) -> (Settings, FileExtras) {
        let settings = Settings {
            domain: self.domain,
            s: self.s,
            p: self.p,
            n: self.n,
            tol: self.tol,
            max_iters: self.max_iters,
            seed: self.seed,
            tau: self.tau,
            lambda0: self.lambda0,
            r: self.r,
            q: self.q,
            lambda_window: self.lambda_window,
            out: self.out,
            threads: self.threads,
        };
        let extras = FileExtras {
            properties: self.properties,
            spectrum: self.spectrum,
            upper: self.upper,
        };
        (settings, extras)
    }
}

pub fn read_config(path: &Path) -> Result<(Settings, FileExtras), CliError> {
    let text = std::fs::read_to_string(path)?;
    let file: ConfigFile =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(file.split())
}

/// Fully resolved settings; serialized into every artifact header.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub domain: DomainSpec,
    pub params: FracParams,
    pub n: usize,
    pub solver: SolverSettings,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub raw: Settings,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iters: usize,
}

impl RunConfig {
    pub fn resolve(
        command: &str,
        flags: Settings,
        file: Option<Settings>,
    ) -> Result<Self, CliError> {
        let merged = match file {
            Some(f) => f.over(flags),
            None => flags,
        };
        let domain = merged
            .domain
            .clone()
            .unwrap_or(DomainField::Text(DEFAULT_DOMAIN.into()))
            .resolve()?;
        let params = FracParams::new(
            merged.s.unwrap_or(0.5),
            merged.p.unwrap_or(2.0),
            domain.dim(),
        )?;
        let defaults = SolverConfig::default();
        let solver = SolverSettings {
            tol: merged.tol.unwrap_or(defaults.tol),
            max_iters: merged.max_iters.unwrap_or(defaults.max_iters),
        };
        let cfg = Self {
            command: command.to_string(),
            domain,
            params,
            n: merged.n.unwrap_or(64),
            solver,
            seed: merged.seed.unwrap_or(0),
            threads: merged.threads,
            out: merged.out.clone().unwrap_or_else(|| PathBuf::from(".")),
            raw: merged,
        };
        cfg.solver_config().validate()?;
        Ok(cfg)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.solver.tol,
            max_iters: self.solver.max_iters,
            seed: self.seed,
            record_log: true,
            ..SolverConfig::default()
        }
    }
}

impl Settings {
    /// `self` wins wherever it has a value.
    fn over(self, base: Settings) -> Settings {
        Settings {
            domain: self.domain.or(base.domain),
            s: self.s.or(base.s),
            p: self.p.or(base.p),
            n: self.n.or(base.n),
            tol: self.tol.or(base.tol),
            max_iters: self.max_iters.or(base.max_iters),
            seed: self.seed.or(base.seed),
            tau: self.tau.or(base.tau),
            lambda0: self.lambda0.or(base.lambda0),
            r: self.r.or(base.r),
            q: self.q.or(base.q),
            lambda_window: self.lambda_window.or(base.lambda_window),
            out: self.out.or(base.out),
            threads: self.threads.or(base.threads),
        }
    }
}
