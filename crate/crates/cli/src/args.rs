use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netboundary::generators::NetworkModel;
use netboundary::shells::DEFAULT_PAIR_SAMPLES;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "netboundary",
    version,
    about = "Shell structure, boundary clusters and branching theory of random networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random network and write it as an edge list
    Generate(GenerateArgs),
    /// BFS shell sizes and per-shell branching around sampled origins
    Profile(ProfileArgs),
    /// Boundary clusters left after removing every shell below a cut
    Boundary(BoundaryArgs),
    /// Generating-function quantities of a model or of a graph's degrees
    Gf(GfArgs),
    /// Power-law, likelihood-ratio and fractal fits on profile or boundary output
    Fit(FitArgs),
    /// Regenerate the data behind one figure, with threshold checks
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Erdős–Rényi G(n, p)
    Er,
    /// Configuration model with power-law degrees
    Sf,
    /// Random regular graph
    Regular,
}

#[derive(Args, Debug, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "er")]
    pub model: ModelKind,
    /// Number of nodes
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Mean degree of ER graphs
    #[arg(long, default_value_t = 6.0)]
    pub mean_degree: f64,
    /// Degree exponent of scale-free graphs
    #[arg(long, default_value_t = 2.5)]
    pub lambda: f64,
    /// Minimum degree of scale-free graphs
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    /// Degree of regular graphs
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
}

impl ModelArgs {
    pub fn network_model(&self) -> NetworkModel {
        build_model(self.model, self.n, self.mean_degree, self.lambda, self.k_min, self.degree)
    }
}

pub fn build_model(kind: ModelKind, n: usize, mean_degree: f64, lambda: f64, k_min: usize, degree: usize) -> NetworkModel {
    match kind {
        ModelKind::Er => NetworkModel::Er { n, mean_degree },
        ModelKind::Sf => NetworkModel::ScaleFree { n, lambda, k_min },
        ModelKind::Regular => NetworkModel::Regular { n, degree },
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Edge-list destination
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ProfileArgs {
    /// Edge list, one `a b` pair per line
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub origins: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Node pairs sampled for the mean distance on large graphs
    #[arg(long, default_value_t = DEFAULT_PAIR_SAMPLES)]
    pub pair_samples: usize,
    /// Write JSON here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub origins: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Remove shells 0..cut-1 [default: ceil of the mean distance]
    #[arg(long)]
    pub cut: Option<usize>,
    /// Also analyse the two cuts after the first
    #[arg(long)]
    pub sweep: bool,
    /// Skip internal cluster distances
    #[arg(long)]
    pub no_distances: bool,
    #[arg(long, default_value_t = DEFAULT_PAIR_SAMPLES)]
    pub pair_samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct GfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Use the empirical degree distribution of this edge list instead of a model
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Shell whose size pdf should be computed (repeatable)
    #[arg(long = "shell-pdf")]
    pub shell_pdf: Vec<usize>,
    /// Largest shell size kept by the truncated composition
    #[arg(long, default_value_t = 1000)]
    pub b_max: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    /// Least squares on the empirical CCDF of shell sizes
    Ccdf,
    /// Least squares on the log-binned pdf of shell sizes
    Pdf,
    /// Discrete maximum likelihood on shell sizes
    Mle,
    /// Power law against exponential likelihood ratio
    Lr,
    /// Slope of the log-binned cluster-size distribution
    Cluster,
    /// Fractal dimension from cluster size against internal distance
    Fractal,
}

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    /// JSON written by `profile` or `boundary`, or `{"samples": [...]}` / `{"pairs": [[s, d], ...]}`
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: FitKind,
    /// Shell of a profile to fit
    #[arg(long)]
    pub shell: Option<usize>,
    /// Cut of a boundary file [default: the first one]
    #[arg(long)]
    pub cut: Option<usize>,
    /// Lower end of the fit range [default: chosen from the data]
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ReproduceArgs {
    /// Figure tag such as 2a or 4c
    #[arg(long)]
    pub figure: String,
    /// Edge list of a real network (required by 2c, 2d, 4b, 4d)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Replace the figure's generated network(s) with this model
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 6.0)]
    pub mean_degree: f64,
    #[arg(long, default_value_t = 2.5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    /// Origins per network [default: 1000, or 200 for cluster figures]
    #[arg(long)]
    pub origins: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent graph realizations to pool
    #[arg(long, default_value_t = 1)]
    pub realizations: usize,
    #[arg(long, default_value_t = DEFAULT_PAIR_SAMPLES)]
    pub pair_samples: usize,
    /// Boundary cut for cluster figures [default: ceil of the mean distance]
    #[arg(long)]
    pub cut: Option<usize>,
    /// Also analyse the two cuts after the default one
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}
