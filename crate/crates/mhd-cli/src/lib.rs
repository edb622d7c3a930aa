//! `mhd`: config-driven experiment runs, spectrum tables and verification
//! suites on top of `mhd-spectral`.
//!
//! Exit codes: 0 ok, 1 I/O failure, 2 config error, 3 numeric breakdown,
//! 4 verdict failure, 5 bound violation.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mhd_spectral::config::{ExperimentConfig, ExperimentKind, Manifest};
use mhd_spectral::experiments::LambdaSource;

pub mod output;
pub mod run;
pub mod spectrum;
pub mod sweep;
pub mod verify;

use output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "mhd", version, about = "Spectral experiments for a 1D MHD vorticity model around its first excited state")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for ensembles.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub kappa: Option<usize>,
    /// Fourier truncation; the basis keeps `nmax − 2` elements.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub tend: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by the config (model dynamics by default).
    Simulate {
        /// `degregorio-groundstate`, `excited-state` or `clm-sine`.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Linearised growth (default) or decay run with envelopes and verdict.
    Linearize,
    /// Table of the coefficients d±, a_k, ε_k and the 2×2 eigenvalues.
    Spectrum {
        #[arg(long, default_value_t = 100)]
        kmax: usize,
    },
    /// Growth envelopes E₁, E₂ for the configured η₀⁺.
    Envelope,
    /// Run a verification suite with default parameters.
    Verify { suite: Suite },
    /// Seeded ensemble of small-data runs, one trace per run.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    LinearInstability,
    LinearDecay,
    NonlinearStability,
    NonlinearInstability,
    Operators,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Io(String),
    Config(String),
    Breakdown(String),
    Verdict(String),
    Bound(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Breakdown(_) => 3,
            Failure::Verdict(_) => 4,
            Failure::Bound(_) => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Breakdown(m) => write!(f, "numeric breakdown: {m}"),
            Failure::Verdict(m) => write!(f, "verdict failed: {m}"),
            Failure::Bound(m) => write!(f, "bound violated: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<mhd_spectral::Error> for Failure {
    fn from(e: mhd_spectral::Error) -> Self {
        use mhd_spectral::Error as E;
        match e {
            E::Breakdown { .. } => Failure::Breakdown(e.to_string()),
            E::BoundViolation(_) => Failure::Bound(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

/// A config with library defaults and no data.
pub fn default_config(experiment: ExperimentKind, t_end: f64) -> ExperimentConfig {
    ExperimentConfig {
        experiment,
        kappa: 2,
        n_max: 128,
        dt: 1e-3,
        t_end,
        data: serde_json::Value::Null,
        lambda_source: LambdaSource::Computed,
        seed: 0,
        out: None,
    }
}

/// Reads `--config` (or takes `default`), then applies the flag overrides.
pub fn load_config(common: &Common, default: ExperimentConfig) -> Result<ExperimentConfig, Failure> {
    let mut c = match &common.config {
        Some(p) => {
            let s = fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            ExperimentConfig::from_json(&s)?
        }
        None => default,
    };
    if let Some(x) = common.seed {
        c.seed = x;
    }
    if let Some(x) = common.kappa {
        c.kappa = x;
    }
    if let Some(x) = common.nmax {
        c.n_max = x;
    }
    if let Some(x) = common.dt {
        c.dt = x;
    }
    if let Some(x) = common.tend {
        c.t_end = x;
    }
    c.validate()?;
    Ok(c)
}

pub fn out_dir(common: &Common, cfg: Option<&ExperimentConfig>) -> Result<OutDir, Failure> {
    let p = common
        .out
        .clone()
        .or_else(|| cfg.and_then(|c| c.out.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    OutDir::create(&p)
}

pub fn write_manifest(out: &OutDir, cfg: &ExperimentConfig, params: serde_json::Value) -> Result<(), Failure> {
    let m = Manifest {
        experiment: cfg.experiment,
        params,
        dt: cfg.dt,
        n_max: cfg.n_max,
        t_end: cfg.t_end,
        seed: cfg.seed,
    };
    out.write_json("manifest.json", &serde_json::to_value(&m).map_err(|e| Failure::Io(e.to_string()))?)
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    match &cli.command {
        Command::Simulate { preset } => {
            let mut default = default_config(ExperimentKind::SimulateMhd, 1.0);
            if let Some(p) = preset {
                default.data = serde_json::json!({ "preset": p });
            }
            if preset.is_some() && common.config.is_some() {
                return Err(Failure::Config("--preset and --config are mutually exclusive".into()));
            }
            let cfg = load_config(common, default)?;
            let out = out_dir(common, Some(&cfg))?;
            run::run_experiment(&cfg, &out)
        }
        Command::Linearize => {
            let cfg = load_config(common, default_config(ExperimentKind::LinearInstability, 5.0))?;
            if !matches!(cfg.experiment, ExperimentKind::LinearInstability | ExperimentKind::LinearDecay) {
                return Err(Failure::Config(format!(
                    "linearize runs linear-instability or linear-decay, not {:?}",
                    cfg.experiment
                )));
            }
            let out = out_dir(common, Some(&cfg))?;
            run::run_experiment(&cfg, &out)
        }
        Command::Envelope => {
            let cfg = load_config(common, default_config(ExperimentKind::LinearInstability, 5.0))?;
            let out = out_dir(common, Some(&cfg))?;
            run::envelope(&cfg, &out)
        }
        Command::Spectrum { kmax } => {
            if common.kappa.is_some_and(|k| k != 2) {
                return Err(Failure::Config("the spectrum table is for κ = 2".into()));
            }
            spectrum::check_kmax(*kmax)?;
            let out = out_dir(common, None)?;
            spectrum::cmd_spectrum(*kmax, &out)
        }
        Command::Verify { suite } => {
            if common.kappa.is_some_and(|k| k != 2) {
                return Err(Failure::Config("verification suites are for κ = 2".into()));
            }
            let out = match &common.out {
                Some(p) => Some(OutDir::create(p)?),
                None => None,
            };
            verify::cmd_verify(*suite, common, out.as_ref())
        }
        Command::Sweep => {
            let cfg = load_config(common, default_config(ExperimentKind::NonlinearStability, 10.0))?;
            let out = out_dir(common, Some(&cfg))?;
            sweep::cmd_sweep(&cfg, common.jobs, &out)
        }
    }
}
