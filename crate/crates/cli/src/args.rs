use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Capacities, isocapacitary constants and p-Laplacian Sobolev constants on
/// weighted graphs with boundary.
///
/// Exit status: 0 on success, 1 on an operational error, 2 when a checked
/// inequality is violated.
#[derive(Debug, Parser)]
#[command(name = "isocap", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a model graph, a disk mesh graph or an OFF mesh graph as JSON.
    Gen(GenArgs),
    /// p-capacity between two vertex sets.
    Cap(CapArgs),
    /// First nontrivial eigenvalue, or (p, alpha)-Sobolev constant.
    Eig(EigArgs),
    /// Isocapacitary constant.
    Isocap(IsocapArgs),
    /// Grade the two-sided bound between the Sobolev and isocapacitary constants.
    Verify(VerifyArgs),
    /// Run `verify` over a grid of exponents.
    Sweep(SweepArgs),
    /// Randomized suites for the one-dimensional, level-set, layer-cake and Hardy inequalities.
    Lemma(LemmaArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Steklov,
    Neumann,
    Dirichlet,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Model family, e.g. `path:3`, `grid2d:3x3`, `random_gnp:10,0.4`.
    #[arg(long = "gen", value_name = "FAMILY:PARAMS")]
    pub gen: Option<String>,
    /// Graph JSON file.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct Spectral {
    /// Descent starts.
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    /// Relative decrease below which a descent stops.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Always descend, even where the exact p = 2 eigen-solve applies.
    #[arg(long)]
    pub no_oracle: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GenSource {
    #[arg(long = "gen", value_name = "FAMILY:PARAMS")]
    pub gen: Option<String>,
    /// Cotangent graph of the unit-disk mesh at this refinement level.
    #[arg(long, value_name = "LEVEL")]
    pub disk: Option<u32>,
    /// Cotangent graph of an OFF triangle mesh.
    #[arg(long, value_name = "FILE")]
    pub off: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: GenSource,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub p: f64,
    /// Vertices held at 1.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<usize>,
    /// Vertices held at 0.
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<usize>,
    /// Relative KKT tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Solve the p = 2 problem as a linear system.
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub spectral: Spectral,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct IsocapArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Largest number of pairs exact enumeration may evaluate.
    #[arg(long, default_value_t = 250_000)]
    pub budget: u64,
    /// Sweep level sets of the computed extremal instead of enumerating.
    #[arg(long)]
    pub heuristic: bool,
    /// Number of levels in the heuristic sweep.
    #[arg(long, default_value_t = 64)]
    pub thresholds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub spectral: Spectral,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long, default_value_t = 250_000)]
    pub budget: u64,
    #[arg(long)]
    pub heuristic: bool,
    #[arg(long, default_value_t = 64)]
    pub thresholds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Where to write the instance when a bound is violated; defaults to
    /// the output path with `.instance.json` appended.
    #[arg(long, value_name = "PATH")]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub spectral: Spectral,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub alpha: Vec<f64>,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long, default_value_t = 250_000)]
    pub budget: u64,
    #[arg(long)]
    pub heuristic: bool,
    #[arg(long, default_value_t = 64)]
    pub thresholds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub spectral: Spectral,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
    pub p: Vec<f64>,
    /// Exponents for the layer-cake suite.
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2")]
    pub alpha: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random draws per suite.
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    /// Cells in the one-dimensional discretization.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Largest graph in the level-set suite.
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
    #[command(flatten)]
    pub output: Output,
}
