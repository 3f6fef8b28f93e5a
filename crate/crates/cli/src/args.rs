//! Flag surface. Every value flag is an Option so the resolver can tell
//! "explicitly given" from "defaulted" when merging with a config file;
//! flags always win over file values.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "dynembed",
    version,
    about = "Dynamic-network embedding models and a temporal link-prediction harness",
    propagate_version = true
)]
pub struct Cli {
    /// Key=value config file; flags override file entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse an edge list and print dataset statistics.
    Ingest(IngestArgs),
    /// Generate a drifting block-model graph as an edge-list file.
    Synth(SynthArgs),
    /// Train one model and write its per-snapshot embeddings.
    Embed(EmbedArgs),
    /// Run the link-prediction protocol over (model, embedder) cells.
    Evaluate(EvaluateArgs),
    /// Repeat evaluate across several dimensions into one combined CSV.
    SweepDim(SweepDimArgs),
}

/// How the input's third column is turned into snapshots. At most one of
/// the three may be given; the default treats it as a bin index.
#[derive(Args, Debug, Clone)]
pub struct BinningArgs {
    /// Bin timestamps into this many equal-width snapshots.
    #[arg(long, value_name = "K", conflicts_with_all = ["boundaries", "prebinned"])]
    pub snapshots: Option<usize>,
    /// Comma-separated ascending cut points on the timestamp axis.
    #[arg(long, value_name = "T1,T2,...", conflicts_with = "prebinned")]
    pub boundaries: Option<String>,
    /// Treat the third column as a snapshot index (the default).
    #[arg(long)]
    pub prebinned: bool,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Edge-list file: one "u v t" interaction per line.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub binning: BinningArgs,
    /// Also write the statistics and a run manifest into this directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub communities: Option<usize>,
    /// Number of snapshots to generate.
    #[arg(long, value_name = "T")]
    pub snapshots: Option<usize>,
    #[arg(long, value_name = "P")]
    pub p_in: Option<f64>,
    #[arg(long, value_name = "P")]
    pub p_out: Option<f64>,
    /// Fraction of vertices re-assigned to random communities per step.
    #[arg(long)]
    pub churn: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; receives graph.txt and run-manifest.txt.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub binning: BinningArgs,
    /// Model to train: StaticBaseline, RET, HomoLT, HeterLT, or BCGD.
    #[arg(long)]
    pub model: Option<String>,
    /// Base embedder: tsvd, pca, randwalk, line, or random.
    #[arg(long)]
    pub embedder: Option<String>,
    #[arg(long, value_name = "D")]
    pub dim: Option<usize>,
    /// Combination rule for per-pair maps: avg, linear, exp, or wct.
    #[arg(long)]
    pub smoothing: Option<String>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Weight base embedders by interaction multiplicity.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub binning: BinningArgs,
    /// Comma-separated model list, or "all".
    #[arg(long)]
    pub model: Option<String>,
    /// Comma-separated base-embedder list.
    #[arg(long)]
    pub embedder: Option<String>,
    #[arg(long, value_name = "D")]
    pub dim: Option<usize>,
    #[arg(long)]
    pub smoothing: Option<String>,
    /// Pin the wct decay instead of searching the theta grid.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Pin the retrofit prior weight instead of searching the alpha grid.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Pin the factorization smoothness weight instead of its grid.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepDimArgs {
    #[command(flatten)]
    pub eval: EvaluateArgs,
    /// Comma-separated dimensions to sweep.
    #[arg(long, value_name = "D1,D2,...")]
    pub dims: Option<String>,
}
