use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "curkit", version, about = "CUR matrix approximation and feature selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Build one CUR approximation and report its error.
    Approx(ApproxArgs),
    /// Rank features (columns) and optionally report class separation.
    Select(SelectArgs),
    /// Choose the number of columns by AIC/BIC.
    Autok(AutokArgs),
    /// Error and timing curves over a grid of c = r values.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Mtx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sf,
    #[value(name = "ls-d")]
    #[serde(rename = "ls-d")]
    LsD,
    #[value(name = "ls-r")]
    #[serde(rename = "ls-r")]
    LsR,
    Deim,
    Qr,
    Pca,
    Svd,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sf => "sf",
            Method::LsD => "ls-d",
            Method::LsR => "ls-r",
            Method::Deim => "deim",
            Method::Qr => "qr",
            Method::Pca => "pca",
            Method::Svd => "svd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionArg {
    Aic,
    Bic,
    Both,
}

/// Input loading and preprocessing. `--center-rows` and `--minmax-cols` refer
/// to the matrix as stored in the file; `--classes` labels the rows of the
/// matrix after `--transpose`.
#[derive(Debug, Args, Serialize)]
pub struct InputArgs {
    /// Matrix file (CSV or Matrix Market).
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Subtract each row's mean.
    #[arg(long)]
    pub center_rows: bool,
    /// Rescale each column to [0, 1].
    #[arg(long)]
    pub minmax_cols: bool,
    /// Work with the transpose of the stored matrix.
    #[arg(long)]
    pub transpose: bool,
    /// One class label per line, one line per row of the working matrix.
    #[arg(long)]
    pub classes: Option<PathBuf>,
    /// Replace missing cells by the class mean of their column.
    #[arg(long)]
    pub fill_missing: bool,
    /// Cell text treated as missing, besides the empty cell.
    #[arg(long = "missing-marker", default_values_t = vec!["NA".to_string()])]
    pub missing_markers: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverArgs {
    /// A group counts as selected when its sup-norm exceeds this.
    #[arg(long, default_value_t = 0.0)]
    pub zero_threshold: f64,
    /// μ as a multiple of its convergence bound.
    #[arg(long, default_value_t = 1.01)]
    pub mu_scale: f64,
    /// Fail when bisection cannot reach the requested count.
    #[arg(long)]
    pub strict_count: bool,
    /// Inner iteration cap per solve.
    #[arg(long, default_value_t = 20)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 60)]
    pub bisection_max_iter: usize,
    /// Start each bisection solve from the previous iterate.
    #[arg(long)]
    pub warm_start: bool,
    /// Rank parameter of the leverage-score methods (default min(10, m, n)).
    #[arg(long)]
    pub rank_k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Output file or directory; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave wall times out of the report so reruns are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub c: usize,
    #[arg(long)]
    pub r: usize,
    /// Fixed weight for the column stage, skipping bisection.
    #[arg(long)]
    pub lambda_c: Option<f64>,
    /// Fixed weight for the row stage, skipping bisection.
    #[arg(long)]
    pub lambda_r: Option<f64>,
    /// Directory to receive C.csv, U.csv and R.csv.
    #[arg(long)]
    pub factors: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub c: usize,
    /// Report per-class counts of entries above the threshold.
    #[arg(long)]
    pub separation: bool,
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
    /// Use the population standard deviation instead of the sample one.
    #[arg(long)]
    pub population_std: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct AutokArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = CriterionArg::Both)]
    pub criterion: CriterionArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated methods; all CUR methods when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Values of c = r: a list `1,2,3` or a range `start:end[:step]`.
    #[arg(long)]
    pub grid: String,
    /// Add the rank-k truncated SVD curve.
    #[arg(long)]
    pub with_svd: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
