use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "te",
    version,
    about = "Transfer entropy as a log-likelihood ratio"
)]
pub struct Cli {
    /// JSON file of default settings; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write results here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for ensemble runs (default: $TE_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate transfer entropy from Y to X.
    Estimate(EstimateArgs),
    /// Estimate with a χ² significance test and confidence interval.
    Test(TestArgs),
    /// Choose the history length by AIC or BIC.
    SelectOrder(SelectOrderArgs),
    /// Write one realization of the binary toy chain as CSV.
    Simulate(SimulateArgs),
    /// Compare the ensemble law of the plug-in statistic with its χ² limit.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Discrete,
    Var,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    /// Re-expresses a value given in nats.
    pub fn convert(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v / std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionArg {
    Aic,
    Bic,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Delimited text file with one observation per row.
    pub input: PathBuf,

    /// Target column(s), by header name or 0-based index; comma-separated for vectors.
    #[arg(long)]
    pub x: Option<String>,

    /// Source column(s).
    #[arg(long)]
    pub y: Option<String>,

    /// Conditioning column (discrete model only).
    #[arg(long)]
    pub z: Option<String>,

    /// First row holds column names.
    #[arg(long)]
    pub header: bool,

    #[arg(long)]
    pub delimiter: Option<char>,

    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,

    #[arg(long)]
    pub alphabet_x: Option<usize>,

    #[arg(long)]
    pub alphabet_y: Option<usize>,

    #[arg(long)]
    pub alphabet_z: Option<usize>,

    /// Quantize each column into this many equal-width bins.
    #[arg(long)]
    pub bins: Option<usize>,

    /// Subtract column means before fitting the VAR model.
    #[arg(long)]
    pub demean: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(short = 'k', long = "order")]
    pub order: Option<usize>,

    #[arg(long, value_enum)]
    pub units: Option<Units>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub estimate: EstimateArgs,

    /// Significance level; the interval has confidence 1 − alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SelectOrderArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long)]
    pub k_max: Option<usize>,

    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Coupling Y → X.
    #[arg(long)]
    pub theta: Option<f64>,

    /// Coupling X → Y.
    #[arg(long)]
    pub phi: Option<f64>,

    #[arg(short = 'n', long = "length")]
    pub n: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    #[arg(long)]
    pub reps: Option<usize>,

    #[arg(short = 'k', long = "order")]
    pub order: Option<usize>,
}
