use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use doshap_core::weights::SchemeKind;
use doshap_core::BaseEstimator;

#[derive(Debug, Parser)]
#[command(name = "doshap", version, about = "Causal attributions over the intervention lattice of a DAG")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the equivalence classes (basis, closure) of the graph.
    Classes(ClassesArgs),
    /// Exact attributions, one game query per class.
    Exact(ExactArgs),
    /// Budgeted estimate with at most `--budget` game queries.
    Estimate(EstimateArgs),
    /// Check whether every coalition value is identifiable.
    Identify(IdentifyArgs),
    /// Shapley interaction indices and n-Shapley values up to `--order`.
    Interactions(InteractionArgs),
    /// Error-versus-budget tables for the estimator.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Graph JSON file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Game JSON file.
    #[arg(long)]
    pub game: PathBuf,
    /// `shapley`, `banzhaf`, or `beta:ALPHA,BETA`.
    #[arg(long, default_value = "shapley", value_parser = parse_scheme)]
    pub scheme: SchemeKind,
    /// Refuse to query the game unless every coalition value is identifiable.
    #[arg(long)]
    pub require_identifiable: bool,
}

#[derive(Debug, Args)]
pub struct ClassesArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Maximum number of game queries.
    #[arg(long)]
    pub budget: usize,
    #[arg(long, default_value = "regression", value_parser = parse_base)]
    pub base: BaseEstimator,
    /// Simulated batch size as a multiple of the budget.
    #[arg(long, default_value_t = doshap_core::estimators::DEFAULT_MULTIPLIER)]
    pub multiplier: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InteractionArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Largest coalition size `n` to report.
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Emit the budget-ratio versus relative-MSE table.
    #[arg(long)]
    pub plot_data: bool,
    /// Budget ratios `m / r`; defaults to 0.1, 0.2, ..., 1.0.
    #[arg(long, value_delimiter = ',')]
    pub ratios: Vec<f64>,
    /// Number of seeds per ratio.
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
    #[arg(long, default_value = "regression", value_parser = parse_base)]
    pub base: BaseEstimator,
    #[arg(long, default_value_t = doshap_core::estimators::DEFAULT_MULTIPLIER)]
    pub multiplier: usize,
    /// First seed; runs use `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse().map_err(|e: doshap_core::Error| e.to_string())
}

fn parse_base(s: &str) -> Result<BaseEstimator, String> {
    s.parse().map_err(|e: doshap_core::Error| e.to_string())
}
