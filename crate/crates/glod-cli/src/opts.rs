use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "glod",
    version,
    about = "Benchmarks and diagnostics for graph-level outlier detection on down-sampled classification datasets"
)]
pub struct Cli {
    /// Worker threads for kernel and detector computation
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score one down-sampled variant of a dataset with a two-stage method
    Bench(BenchArgs),
    /// AUC versus down-sampling rate for both variants
    SweepRate(SweepRateArgs),
    /// AUC and variant gap versus propagation iterations
    SweepIters(SweepItersArgs),
    /// Similarity, MDS, NN-Radius and NN-Disagreement bundles per iteration
    Diag(DiagArgs),
    /// WL distance curves between perturbed k-regular graph pairs
    Sim(SimArgs),
    /// Consolidate bench summaries into a flip-classification table
    FlipTable(FlipTableArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DataOpts {
    /// Directory holding one TU-format subdirectory per dataset
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,

    /// Dataset name (subdirectory and file prefix)
    #[arg(long)]
    pub dataset: String,
}

#[derive(Args, Debug, Clone)]
pub struct MethodOpts {
    /// Two-stage method, e.g. wl+lof, pk+ocsvm, fgsd+iforest
    #[arg(long)]
    pub method: String,

    /// Propagation iterations L (wl and pk)
    #[arg(long = "L", default_value_t = 5)]
    pub iterations: usize,

    /// PK hash bin width
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,

    /// LOF neighborhood size
    #[arg(long, default_value_t = 20)]
    pub neighbors: usize,

    /// OCSVM nu
    #[arg(long, default_value_t = 0.1)]
    pub nu: f64,

    /// Isolation Forest ensemble size
    #[arg(long, default_value_t = 100)]
    pub trees: usize,

    /// Isolation Forest subsample size
    #[arg(long, default_value_t = 256)]
    pub subsample: usize,

    /// FGSD histogram bins
    #[arg(long, default_value_t = 200)]
    pub fgsd_bins: usize,

    /// FGSD histogram range maximum
    #[arg(long, default_value_t = 20.0)]
    pub fgsd_range: f64,

    /// Lift the FGSD 2000-node graph size cap
    #[arg(long)]
    pub allow_large_graphs: bool,
}

#[derive(Args, Debug, Clone)]
pub struct RunOpts {
    /// Down-sampling rate in (0, 1]
    #[arg(long, default_value_t = 0.1)]
    pub rate: f64,

    /// Number of down-sampling seeds (0..seeds)
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,

    /// Slice features out of one full-data computation instead of
    /// recomputing them per variant
    #[arg(long)]
    pub slice_mode: bool,

    /// Kernel cache directory (env GLOD_CACHE_DIR as fallback)
    #[arg(long, env = "GLOD_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub method: MethodOpts,
    #[command(flatten)]
    pub run: RunOpts,

    /// Class to down-sample as outliers
    #[arg(long)]
    pub dc: u32,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepRateArgs {
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub method: MethodOpts,
    #[command(flatten)]
    pub run: RunOpts,

    /// Comma-separated down-sampling rates
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.1, 0.2, 0.4, 0.6, 0.85])]
    pub rates: Vec<f64>,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepItersArgs {
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub method: MethodOpts,
    #[command(flatten)]
    pub run: RunOpts,

    /// Comma-separated iteration budgets
    #[arg(long = "iters", value_delimiter = ',', default_values_t = vec![1, 3, 5, 7, 9, 11])]
    pub iteration_values: Vec<usize>,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DiagArgs {
    #[command(flatten)]
    pub data: DataOpts,

    /// Similarity source: wl, pk or fgsd
    #[arg(long)]
    pub method: String,

    /// Iterations to report (wl and pk)
    #[arg(long = "iters", value_delimiter = ',', default_values_t = vec![1, 2, 3, 4, 5])]
    pub iteration_values: Vec<usize>,

    /// PK hash bin width
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,

    /// PK hash seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// FGSD histogram bins
    #[arg(long, default_value_t = 200)]
    pub fgsd_bins: usize,

    /// FGSD histogram range maximum
    #[arg(long, default_value_t = 20.0)]
    pub fgsd_range: f64,

    /// Lift the FGSD 2000-node graph size cap
    #[arg(long)]
    pub allow_large_graphs: bool,

    /// Neighborhood size for NN-Radius / NN-Disagreement
    #[arg(long, default_value_t = 20)]
    pub neighbors: usize,

    /// Group points by class (full data) or by inlier/outlier flags of a
    /// down-sampled variant
    #[arg(long, value_parser = ["class", "variant"], default_value = "class")]
    pub grouping: String,

    /// Down-sampled class (grouping = variant)
    #[arg(long, default_value_t = 0)]
    pub dc: u32,

    /// Down-sampling rate (grouping = variant)
    #[arg(long, default_value_t = 0.1)]
    pub rate: f64,

    /// Down-sampling seed (grouping = variant)
    #[arg(long, default_value_t = 0)]
    pub variant_seed: u64,

    /// Use cumulative kernel sums through each iteration instead of
    /// single-iteration slices
    #[arg(long)]
    pub cumulative: bool,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    /// Perturbation case: 1 = label flips, 2 = edge rewiring
    #[arg(long)]
    pub case: u8,

    /// Nodes per graph
    #[arg(long)]
    pub n: usize,

    /// Degree(s); several values sweep k with a single magnitude
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,

    /// Label-flip counts (case 1)
    #[arg(long = "m", value_delimiter = ',')]
    pub flips: Vec<usize>,

    /// Edge-pair rewiring counts (case 2)
    #[arg(long = "r", value_delimiter = ',')]
    pub rewires: Vec<usize>,

    /// Maximum WL iteration
    #[arg(long = "iters", default_value_t = 10)]
    pub iterations: usize,

    /// Rounds to average over
    #[arg(long, default_value_t = 100)]
    pub rounds: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FlipTableArgs {
    /// Directory scanned recursively for summary.csv files
    #[arg(long)]
    pub results: PathBuf,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}
