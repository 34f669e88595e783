use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "mwk", version, about = "Minkowski weighted k-means, MWK++ seeding and weight-stability feature selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Result format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    pub emit: Emit,

    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitArg {
    Mwkpp,
    Kmeanspp,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fs,
    Sfs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Table2,
    Table3,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "command")]
pub enum Command {
    /// Cluster a CSV dataset with MWK (best of several restarts).
    Cluster(ClusterArgs),
    /// Rank features by weight stability (FS-MWK++ or SFS-MWK++).
    Select(SelectArgs),
    /// Generate synthetic benchmark datasets.
    Synth(SynthArgs),
    /// Score a predicted partition against true labels.
    Eval(EvalArgs),
    /// Check the weight bounds on a stored or fresh weight stack, or the
    /// selection condition on given inputs.
    Audit(AuditArgs),
    /// Run a desk-scale benchmark suite.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,

    /// Column holding ground-truth labels, excluded from the features.
    #[arg(long)]
    pub label_column: Option<String>,

    /// Use values as given instead of range-normalizing each feature.
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Minkowski center computation.
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,

    /// Independent runs per exponent; the lowest objective wins.
    #[arg(long, default_value_t = 25)]
    pub restarts: usize,

    /// Iteration cap per run.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ClusterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,

    #[arg(long)]
    pub k: usize,

    /// Minkowski exponent (> 1).
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,

    #[arg(long, value_enum, default_value_t = InitArg::Mwkpp)]
    pub init: InitArg,

    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,

    /// Write `index,cluster` assignments here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,

    #[arg(long)]
    pub k: usize,

    /// Number of features to select.
    #[arg(long)]
    pub r: usize,

    #[arg(long, value_enum, default_value_t = Method::Fs)]
    pub method: Method,

    /// `fine`, `coarse` or a comma-separated list of exponents.
    #[arg(long, default_value = "fine")]
    pub grid: String,

    /// Subsamples for the subsampled selector.
    #[arg(long, default_value_t = 25)]
    pub outer: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,

    /// Write the ranking as CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write the full weight stack as JSON here.
    #[arg(long)]
    pub save_stack: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Configuration name such as "1000x4-5 +2NF".
    #[arg(long)]
    pub config: String,

    #[arg(long, default_value_t = 1)]
    pub count: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// CSV with the true labels.
    #[arg(long)]
    pub truth: PathBuf,

    #[arg(long, default_value = "label")]
    pub truth_column: String,

    /// CSV with the predicted clusters.
    #[arg(long)]
    pub pred: PathBuf,

    #[arg(long, default_value = "cluster")]
    pub pred_column: String,
}

#[derive(Debug, Args, Serialize)]
pub struct AuditArgs {
    /// Weight stack JSON written by `select --save-stack`.
    #[arg(long, conflicts_with_all = ["input", "theorem"])]
    pub stack: Option<PathBuf>,

    /// Informative mask as 0/1 list, e.g. "1,1,1,0".
    #[arg(long)]
    pub mask: Option<String>,

    /// CSV with a mask row; a fresh weight stack is computed on it.
    #[arg(long, conflicts_with = "theorem")]
    pub input: Option<PathBuf>,

    #[arg(long)]
    pub label_column: Option<String>,

    #[arg(long)]
    pub no_normalize: bool,

    #[arg(long)]
    pub k: Option<usize>,

    #[arg(long, default_value = "fine")]
    pub grid: String,

    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,

    /// Evaluate the selection condition instead of auditing weights.
    #[arg(long)]
    pub theorem: bool,

    #[arg(long, requires = "theorem")]
    pub gamma: Option<f64>,

    #[arg(long, requires = "theorem")]
    pub alpha: Option<f64>,

    /// Exponent for the selection condition.
    #[arg(long, requires = "theorem")]
    pub p: Option<f64>,

    /// A(p); derived from --ratio/--m when omitted.
    #[arg(long, requires = "theorem")]
    pub a: Option<f64>,

    /// L(p); derived from --ratio/--m when omitted.
    #[arg(long, requires = "theorem")]
    pub l: Option<f64>,

    /// Common dispersion ratio a_u used to derive A and L.
    #[arg(long, requires = "theorem")]
    pub ratio: Option<f64>,

    /// Number of features.
    #[arg(long, requires = "theorem")]
    pub m: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,

    /// Datasets per configuration.
    #[arg(long, default_value_t = 10)]
    pub datasets: usize,

    /// Comma-separated configuration names; all twelve when omitted.
    #[arg(long)]
    pub configs: Option<String>,

    #[arg(long, default_value = "fine")]
    pub grid: String,

    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
}
