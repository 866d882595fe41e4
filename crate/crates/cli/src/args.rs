use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "flowembed", version, about = "Tilings, the zero-placing map and desk-scale flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive and optionally validate the constant record.
    Params(ParamsArgs),
    /// Build the interval tiling of a marker sequence.
    Tile(TileArgs),
    /// Evaluate and certify the map built from a marker.
    Phi(PhiArgs),
    /// Flows, sections, returns and the suspension embedding.
    Flow(FlowArgs),
    /// Run the acceptance suites and write one consolidated report.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.8)]
    pub delta: f64,
    #[arg(long = "L", default_value_t = 10.0)]
    pub l: f64,
    #[arg(long = "M", default_value_t = 10)]
    pub m: i64,
    #[arg(long = "M1", default_value_t = 25)]
    pub m1: i64,
    #[arg(long, default_value_t = 1.02)]
    pub c: f64,
    /// Attach the validation checks and fail when one does not hold.
    #[arg(long)]
    pub validate: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MarkerSource {
    /// Marker sequence JSON.
    #[arg(long, conflicts_with = "seed")]
    pub marker: Option<PathBuf>,
    /// Draw a random marker instead.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub window: Option<Vec<i64>>,
    #[arg(long = "M", default_value_t = 10)]
    pub m: i64,
    #[arg(long = "M1", default_value_t = 25)]
    pub m1: i64,
}

#[derive(Debug, Args)]
pub struct TileArgs {
    #[command(flatten)]
    pub source: MarkerSource,
    #[arg(long, default_value_t = 1.02)]
    pub c: f64,
    /// Tiling JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Coverage, equivariance and geometry report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// SVG diagram of the valid cells.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhiAction {
    Eval,
    Zeros,
    Rigidity,
    Spectrum,
    Perturb,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    pub action: PhiAction,
    /// Constant record JSON; the default record when absent.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[command(flatten)]
    pub source: MarkerSource,
    /// Second marker for `rigidity` and the partner in `perturb`.
    #[arg(long, conflicts_with = "seed2")]
    pub marker2: Option<PathBuf>,
    #[arg(long)]
    pub seed2: Option<u64>,
    /// Real range for `eval` and `zeros`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub range: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 200.0)]
    pub window_radius: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub r_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for SVG figures.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlowAction {
    Simulate,
    Return,
    Conjugacy,
    Boundary,
    SuspendEmbed,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    pub action: FlowAction,
    /// `solenoid:N`, `product:N:k` or `suspension:FILE`.
    #[arg(long)]
    pub system: String,
    /// Section index `n` of `S_n`; ignored for suspensions.
    #[arg(long, default_value_t = 2)]
    pub section: usize,
    /// Starting top coordinate or base state.
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub dt: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Probe half-width; half the injectivity time when absent.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Trajectory CSV for `simulate`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Run only these suites.
    #[arg(long = "suite")]
    pub suites: Vec<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for SVG figures.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}
