//! `culinaria`: mine, fingerprint and cluster cuisines from a recipe corpus.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "culinaria", version, about = "Mine and cluster cuisines from recipe corpora")]
pub struct Cli {
    /// Recipe corpus (JSON Lines or CSV).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Corpus format; inferred from the extension when omitted.
    #[arg(long, global = true, value_parser = ["jsonl", "csv"])]
    pub format: Option<String>,
    /// Directory for all outputs.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed for every random choice (K-means only).
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine frequent patterns per cuisine and write pattern TSVs plus summary.tsv.
    Mine(MineArgs),
    /// Build cuisine trees from mined pattern vectors.
    Cluster(ClusterArgs),
    /// Compute prevalence, relative prevalence and the authenticity tree.
    Authenticity(AuthenticityArgs),
    /// Build the great-circle distance tree of regions.
    Geo(GeoArgs),
    /// Run K-means over a range of k on pattern vectors.
    Elbow(ElbowArgs),
    /// Compare two trees saved as linkage.json.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Minimum support as a fraction of each cuisine's recipes.
    #[arg(long, default_value_t = culinaria::mining::DEFAULT_MIN_SUPPORT, allow_negative_numbers = true)]
    pub min_support: f64,
    /// Item classes to mine: `all` or a comma list of ingredient, process, utensil.
    #[arg(long, default_value = "all")]
    pub classes: String,
    /// Longest pattern to report.
    #[arg(long)]
    pub max_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Distance metrics: `all` or a comma list of jaccard, cosine, euclidean.
    #[arg(long, default_value = "all")]
    pub metric: String,
    #[arg(long, default_value = "average")]
    pub linkage: String,
    /// Use pattern supports instead of presence bits.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Debug, Args)]
pub struct AuthenticityArgs {
    /// Item classes to score.
    #[arg(long, default_value = "ingredient")]
    pub classes: String,
    /// Divide counts by the whole corpus size instead of each cuisine's size.
    #[arg(long)]
    pub global_denominator: bool,
    /// Subtract the mean over all cuisines instead of the other cuisines.
    #[arg(long)]
    pub mean_all: bool,
    /// Items listed per cuisine and direction in fingerprints.tsv.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Cluster on prevalence rather than relative prevalence.
    #[arg(long)]
    pub raw_prevalence: bool,
    #[arg(long, default_value = "euclidean")]
    pub metric: String,
    #[arg(long, default_value = "average")]
    pub linkage: String,
}

#[derive(Debug, Args)]
pub struct GeoArgs {
    /// `region,lat,lon` CSV; the bundled table is used when omitted.
    #[arg(long)]
    pub coords: Option<PathBuf>,
    #[arg(long, default_value = "average")]
    pub linkage: String,
}

#[derive(Debug, Args)]
pub struct ElbowArgs {
    /// Inclusive k range such as `1..4`; defaults to 1 up to the cuisine count (at most 10).
    #[arg(long)]
    pub k_range: Option<String>,
    /// Random K-means++ starts per k.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Use pattern supports instead of presence bits.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// linkage.json of the first tree, or the directory holding it.
    #[arg(long)]
    pub left: PathBuf,
    /// linkage.json of the second tree, or the directory holding it.
    #[arg(long)]
    pub right: PathBuf,
    /// Rank correlation of cophenetic distances instead of Pearson.
    #[arg(long)]
    pub spearman: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| commands::run(&cli))
        .unwrap_or_else(|_| Err(CliError::internal(anyhow::anyhow!("unexpected panic"))));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("culinaria: {err}");
            err.exit_code()
        }
    }
}
