use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skis::evaluator::bench::ImAlgorithm;
use skis::{DiffusionModel, SketchKind, WeightMode};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "skis",
    version,
    about = "Importance sketches for influence estimation and maximization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a sketch from a graph and write it to a file.
    ///
    /// Prints one JSON line: {"kind","T","total_entries","Gamma","build_seconds","bytes"}.
    Build(BuildArgs),
    /// Answer influence queries from a sketch, one JSON line per seed set.
    Estimate(EstimateArgs),
    /// Select k seeds by greedy over a sketch or by the stop-and-stare driver.
    Maximize(MaximizeArgs),
    /// Exact or Monte-Carlo influence of seed sets.
    ///
    /// CSV columns: seed_set,value,method,epsilon,delta,samples_used.
    /// Seed sets are space-separated inside the first column.
    Groundtruth(GroundtruthArgs),
    /// Benchmark drivers writing CSV tables.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Write a preferential-attachment graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Edge-list file: `u v [w]` per line, `#` comments.
    #[arg(long, conflicts_with = "fixture")]
    pub graph: Option<PathBuf>,
    /// Name of a shipped fixture (see SKIS_FIXTURES_DIR); implies its model
    /// and given weights.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long, default_value = "ic")]
    pub model: DiffusionModel,
    /// given, wc, tri or lt-random.
    #[arg(long = "weights", default_value = "given")]
    pub weights: WeightMode,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SeedSetArgs {
    /// Inline seed set, comma separated; repeat for several sets.
    #[arg(long = "seeds")]
    pub seeds: Vec<String>,
    /// File with one seed set per line (ids separated by spaces or commas).
    #[arg(long)]
    pub seed_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value = "skis")]
    pub kind: SketchKind,
    /// Total entries h·n·ln n.
    #[arg(long, conflicts_with = "count")]
    pub h: Option<f64>,
    /// Exact number of samples.
    #[arg(long)]
    pub count: Option<usize>,
    /// Sketch file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub sketch: PathBuf,
    /// Optional graph; its content hash must match the sketch.
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub sets: SeedSetArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Greedy,
    Dssa,
}

#[derive(Debug, Args)]
pub struct MaximizeArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long)]
    pub k: usize,
    /// Required for greedy.
    #[arg(long)]
    pub sketch: Option<PathBuf>,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Defaults to 1/n.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Sample kind used by dssa.
    #[arg(long, default_value = "skis")]
    pub kind: SketchKind,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct GroundtruthArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub sets: SeedSetArgs,
    /// Require exhaustive enumeration.
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    /// Force the Monte-Carlo stopping rule.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 0.005)]
    pub epsilon: f64,
    /// Defaults to 1/n.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Estimation error against ground truth on random seed sets.
    ///
    /// Long CSV columns: record (query|aggregate|histogram), method, h,
    /// seed_set_size, samples, query, estimate, truth, rel_diff_pct,
    /// bin_lower_pct, bin_upper_pct, count. Aggregate rows hold the mean
    /// error; histogram rows count queries per error bin. The summary
    /// table has one h(..) column per sketch size.
    Ie(BenchIeArgs),
    /// Maximization quality at fixed sample budgets.
    ///
    /// CSV columns: algorithm, k, budget, trial, influence, runtime_s,
    /// memory_bytes, samples, seeds. DSSA rows leave budget and
    /// memory_bytes empty.
    Im(BenchImArgs),
}

#[derive(Debug, Args)]
pub struct BenchIeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Sketch size multiplier; repeat for several columns.
    #[arg(long = "h", default_values_t = [5.0, 10.0])]
    pub hs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [SketchKind::SKIS, SketchKind::RIS])]
    pub kinds: Vec<SketchKind>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 100, 1000])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    /// Truth falls back to Monte-Carlo at these parameters when exact
    /// enumeration is too large.
    #[arg(long, default_value_t = 0.005)]
    pub truth_epsilon: f64,
    #[arg(long)]
    pub truth_delta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the wide summary table here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BenchImArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 50])]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1000, 10000, 100000])]
    pub budgets: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = ImAlgorithm::ALL.to_vec())]
    pub algorithms: Vec<ImAlgorithm>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Monte-Carlo evaluation of returned seed sets.
    #[arg(long, default_value_t = 0.005)]
    pub truth_epsilon: f64,
    #[arg(long)]
    pub truth_delta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub dssa_epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub nodes: usize,
    /// Edges per arriving node.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
