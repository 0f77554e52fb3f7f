use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gtnet_core::graph::{Scheme, SynthKind};
use gtnet_core::models::Arch;

fn parse_arch(s: &str) -> Result<Arch, String> {
    s.parse().map_err(|e: gtnet_core::Error| e.to_string())
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: gtnet_core::Error| e.to_string())
}

fn parse_graph(s: &str) -> Result<SynthKind, String> {
    s.parse().map_err(|e: gtnet_core::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "gtnet", version, about = "Graph tree networks: training, depth sweeps, ablations and theory checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one model for a number of seeded runs.
    Train(TrainArgs),
    /// Evaluate a saved checkpoint on a dataset.
    Eval(EvalArgs),
    /// Accuracy against depth for several models.
    SweepDepth(SweepArgs),
    /// Depth sweep over all eight architectures.
    Ablation(SweepArgs),
    /// Numerical checks of the convergence and smoothing results on a graph.
    Verify(VerifyArgs),
    /// Write a seeded synthetic dataset directory.
    Synth(SynthArgs),
}

/// Dataset, hyperparameter and run flags shared by the training commands.
/// Hyperparameter flags override the preset.
#[derive(Debug, Clone, Args)]
pub struct RunFlags {
    /// Dataset directory, or a name under $GTNET_DATA_DIR.
    #[arg(long)]
    pub dataset: String,
    /// `published` (dataset inferred from the directory name) or `published:<dataset>`.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub dropout_input: Option<f64>,
    #[arg(long)]
    pub dropout_prop: Option<f64>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Run `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Adjacency normalization: `sym` or `row`.
    #[arg(long, value_parser = parse_scheme, default_value = "sym")]
    pub scheme: Scheme,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Concurrent runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Scale feature rows to sum to one.
    #[arg(long)]
    pub row_normalize: bool,
    #[arg(long, env = "GTNET_DATA_DIR", hide_env_values = true)]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// gtcn, gtan, gcn, gat, simple_gcn, simple_gat, gtcn2 or gtan2.
    #[arg(long, value_parser = parse_arch)]
    pub model: Arch,
    /// Propagation depth (layers for gcn/gat); defaults depend on the model.
    #[arg(long)]
    pub hops: Option<usize>,
    /// Also write the best parameters of each run.
    #[arg(long)]
    pub save_checkpoints: bool,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated model list; defaults to gtcn,gtan,gcn,gat (all eight for ablation).
    #[arg(long, value_parser = parse_arch, value_delimiter = ',')]
    pub models: Vec<Arch>,
    #[arg(long, value_delimiter = ',', default_value = "2,5,10")]
    pub depths: Vec<usize>,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub dataset: String,
    /// Adjacency normalization: `sym` or `row`.
    #[arg(long, value_parser = parse_scheme, default_value = "sym")]
    pub scheme: Scheme,
    #[arg(long)]
    pub row_normalize: bool,
    /// Seed for the random split when the dataset ships none.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the metrics here as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "GTNET_DATA_DIR", hide_env_values = true)]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Synthetic graph, e.g. `complete:3`, `path:5`, `erdos_renyi:200:0.05:3`.
    #[arg(long, value_parser = parse_graph, conflicts_with = "dataset")]
    pub graph: Option<SynthKind>,
    /// Use the graph of a dataset directory.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Strictly increasing depths for the convergence trace.
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<usize>>,
    /// Seed of the random Z used for convergence checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "GTNET_DATA_DIR", hide_env_values = true)]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Named topology; labels are `node mod classes`.
    #[arg(long, value_parser = parse_graph, conflicts_with = "communities")]
    pub graph: Option<SynthKind>,
    /// Planted partition `n:p_in:p_out`.
    #[arg(long)]
    pub communities: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub features: usize,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    /// Per-node feature noise around the class mean.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    /// One-hot identity features instead of Gaussian ones.
    #[arg(long)]
    pub identity_features: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
