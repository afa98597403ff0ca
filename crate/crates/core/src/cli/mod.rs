//! The `dephasim` command-line front end.
//!
//! Every command resolves a parameter bundle from `--config` and/or
//! `--preset`, evaluates a sweep, writes its CSV files atomically into the
//! output directory and appends a [`RunManifest`] entry to
//! `<out>/manifest.json`.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical tolerance
//! failure, 4 I/O error.

mod commands;
mod output;
mod presets;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::decay::Regime;
use crate::params::{self, ParamBundle, ParamError, RawConfig};

pub use commands::fit_phase_dependence;
pub use output::{append_manifest, write_atomic, CsvTable, RunManifest};
pub use presets::Preset;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Tolerance(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        match e {
            ParamError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dephasim", version, about = "Dephasing dynamics of a qubit in a squeezed thermal bath")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON parameter file. Keys present here override the preset.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in parameter set.
    #[arg(long, global = true, value_enum)]
    pub preset: Option<PresetArg>,
    /// Output directory. `DEPHASIM_OUT`, when set, takes precedence.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Start of the time grid (Ω_c t; ω_k t for `mode`).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tau_min: Option<f64>,
    /// End of the time grid (Ω_c t; ω_k t for `mode`).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tau_max: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Fock truncation dimension; chosen automatically when omitted.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Worker threads for the sweeps; defaults to all cores. 1 runs sequentially.
    #[arg(long, global = true)]
    pub parallel: Option<usize>,
    /// Coefficient regime for `decay` and `system`.
    #[arg(long, global = true)]
    pub regime: Option<Regime>,
    /// Number of δθ samples for `bath` and `rates`.
    #[arg(long, global = true)]
    pub theta_steps: Option<usize>,
    /// Largest accepted relative deviation between closed forms and oracles.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub max_rel_dev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Decoherence coefficients and Γ(t) against the quadrature oracle.
    Decay,
    /// Long-time dephasing rates κ and κ' with their δθ dependence.
    Rates,
    /// Single-mode entropy rate: exact diagonalization vs the semi-Born estimate.
    Mode,
    /// Bath-entropy rate and the f(t, δθ) landscape.
    Bath,
    /// Qubit trajectory: coherence, Bloch norm and entropy, with the Markov channel.
    System,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Decay => "decay",
            Command::Rates => "rates",
            Command::Mode => "mode",
            Command::Bath => "bath",
            Command::System => "system",
        }
    }
}

/// Result of a successful command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub outputs: Vec<PathBuf>,
    pub summary: Vec<String>,
}

/// Merge the preset and the config file, then validate.
pub fn resolve_params(common: &CommonArgs) -> Result<(RawConfig, ParamBundle), CliError> {
    let base = common.preset.map(|p| Preset::from(p).config());
    let raw = match (&common.config, base) {
        (None, None) => return Err(CliError::Validation("either --config or --preset is required".into())),
        (None, Some(raw)) => raw,
        (Some(path), base) => {
            let text = std::fs::read_to_string(path).map_err(|source| {
                CliError::from(ParamError::Io {
                    path: path.display().to_string(),
                    source,
                })
            })?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::from(ParamError::Json(e)))?;
            let merged = match base {
                Some(b) => {
                    let mut m = serde_json::to_value(b).expect("raw config serializes");
                    let obj = value
                        .as_object()
                        .ok_or_else(|| CliError::Validation("config must be a JSON object".into()))?;
                    for (k, v) in obj {
                        m[k] = v.clone();
                    }
                    m
                }
                None => value,
            };
            serde_json::from_value(merged).map_err(|e| CliError::from(ParamError::Json(e)))?
        }
    };
    let bundle = params::validate(&raw)?;
    Ok((raw, bundle))
}

/// Parse `args` and run the selected command.
pub fn run<I, T>(args: I) -> Result<Report, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Validation(e.to_string()))?;
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Result<Report, CliError> {
    let threads = cli.common.parallel;
    if threads == Some(0) {
        return Err(CliError::Validation("--parallel must be ≥ 1".into()));
    }
    crate::exec::with_threads(threads, || commands::dispatch(cli.command, &cli.common))
}

/// Entry point used by the binary: prints the outcome and returns the exit code.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            for p in &report.outputs {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("dephasim: {e}");
            e.exit_code()
        }
    }
}
