//! `sopcast` command-line driver.
//!
//! Exit status: 0 on success, 1 on usage or configuration errors, 2 when the
//! data or a model fails validation.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sopcast::forecast::CorrelationPolicy;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] sopcast::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "sopcast", version, about = "Wavelet-network SOP forecasting with weather inputs")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic SOP and weather recording.
    Synth(SynthArgs),
    /// Train every model on the data before the split and save the bundles.
    Train(TrainArgs),
    /// Forecast from the end of the data (or from --at).
    Forecast(ForecastArgs),
    /// Score all methods on the held-out period.
    Eval(EvalArgs),
    /// Dump the wavelet pyramid of one SOP window as JSON.
    Decompose(DecomposeArgs),
    /// Per-band Pearson correlations between SOP and each weather channel.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// SOP CSV (`timestamp,sop_rad_per_s`).
    #[arg(long, value_name = "FILE")]
    pub sop: Option<PathBuf>,
    /// Weather CSV (`timestamp,wind_gust,temperature,humidity`).
    #[arg(long, value_name = "FILE")]
    pub weather: Option<PathBuf>,
    /// Directory holding sop_1s.csv and weather_30min.csv.
    #[arg(long, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator seed; defaults to the config seed, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Recording length in days (overrides `synth.duration_s`).
    #[arg(long)]
    pub days: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Training seed; defaults to the config seed, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for the model bundles.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// How exogenous channels are wired to SOP bands.
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Short,
    Long,
    Adaptive,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Directory holding the trained bundles.
    #[arg(long, value_name = "DIR")]
    pub models: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "short")]
    pub mode: Mode,
    /// Forecast origin (RFC3339 or epoch seconds); defaults to the latest usable one.
    #[arg(long, value_name = "TIME")]
    pub at: Option<String>,
    /// Gust threshold for the adaptive gate, overriding the trained one.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Output CSV; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Directory holding the trained bundles.
    #[arg(long, value_name = "DIR")]
    pub models: Option<PathBuf>,
    /// Seed recorded in the reports; defaults to the training seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for the report files.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// SOP CSV to read the window from.
    #[arg(long, value_name = "FILE")]
    pub sop: Option<PathBuf>,
    /// Directory holding sop_1s.csv.
    #[arg(long, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// Window length; defaults to the short-term window.
    #[arg(long)]
    pub window: Option<usize>,
    /// Decomposition levels; defaults to the short-term setting.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Timestamp of the last sample in the window; defaults to the end.
    #[arg(long, value_name = "TIME")]
    pub at: Option<String>,
    /// Output JSON; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    Short,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Top1,
    #[value(alias = "paper-default")]
    Approximation,
}

impl From<PolicyArg> for CorrelationPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Top1 => CorrelationPolicy::Top1,
            PolicyArg::Approximation => CorrelationPolicy::Approximation,
        }
    }
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Which window geometry and weather resolution to correlate on.
    #[arg(long, value_enum, default_value = "short")]
    pub scale: ScaleArg,
    /// Output CSV; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Usage(_) => ExitCode::from(1),
                CliError::Data(_) => ExitCode::from(2),
            }
        }
    }
}
