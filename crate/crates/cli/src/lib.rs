//! `chaoscs` command-line experiments.
//!
//! Every subcommand writes one CSV result and a `<stem>.manifest.json`
//! beside it. Parameters come from flags, then a flat JSON file passed with
//! `--config`, then (for the seed only) `CHAOS_CS_SEED`, then defaults.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
pub mod config;
pub mod output;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, bad config values, missing parameters.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] chaoscs::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use chaoscs::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                E::InvalidParameter(_) | E::TooLarge(_) | E::DimensionMismatch { .. } | E::LengthMismatch { .. },
            ) => 2,
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "chaoscs",
    version,
    about = "Compressive sampling with chaotic measurement matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a scalar sequence (`index,value`).
    Generate(GenerateArgs),
    /// Normalized autocorrelation of a sequence (`lag,value`).
    Autocorr(SignalArgs),
    /// Empirical density of a sequence (`bin_left,bin_right,density`).
    Pdf(SignalArgs),
    /// Mutual coherence of a measurement matrix against a sparsity basis.
    Coherence(CoherenceArgs),
    /// Restricted isometry constants by exhaustive search (`k,delta_k`).
    Rip(RipArgs),
    /// Export a measurement matrix.
    Matrix(MatrixArgs),
    /// Failure rate against sparsity for one ensemble.
    RecoveryCurve(CurveArgs),
    /// Largest sparsity with failure rate below a threshold.
    Kmax(KmaxArgs),
    /// Histogram of log10 relative reconstruction errors.
    Histogram(HistogramArgs),
    /// Failure rates of several ensembles on common trials.
    Compare(CompareArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Flat JSON object of parameters; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (falls back to CHAOS_CS_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Result CSV; defaults to `<command>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Overrides for chaotic and correlated sources.
#[derive(Debug, Args, Default)]
pub struct SourceArgs {
    /// Sampling distance of chaotic sources, in time units.
    #[arg(long)]
    pub tau: Option<f64>,
    /// RK4 step.
    #[arg(long)]
    pub h: Option<f64>,
    /// Discarded transient, in time units.
    #[arg(long = "burn-in")]
    pub burn_in: Option<f64>,
    /// AR(1) correlation coefficient.
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct ShapeArgs {
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct TrialArgs {
    /// Trials per sparsity.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Success threshold on the relative error.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Solver duality-gap tolerance.
    #[arg(long = "gap-tol")]
    pub gap_tol: Option<f64>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// Subtract the sequence mean before scaling.
    #[arg(long)]
    pub center: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub length: Option<usize>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SignalArgs {
    /// Integrate a system from its default initial state.
    #[arg(long, conflicts_with = "ensemble")]
    pub system: Option<String>,
    /// Or draw a seeded sequence from an ensemble.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// State coordinate (1, 2 or 3) when integrating a system.
    #[arg(long)]
    pub coordinate: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Largest lag, in samples (autocorr).
    #[arg(long = "max-lag")]
    pub max_lag: Option<usize>,
    /// Number of bins (pdf).
    #[arg(long)]
    pub bins: Option<usize>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Sparsity basis: `identity` or `dct`.
    #[arg(long)]
    pub basis: Option<String>,
    #[arg(long)]
    pub center: bool,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct RipArgs {
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Sparsities, e.g. `1:4` or `1,2,3`.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub center: bool,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub center: bool,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Sparsities, e.g. `1:2:29` or `5,10,15`.
    #[arg(long)]
    pub k: Option<String>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub trials: TrialArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct KmaxArgs {
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// One or more measurement counts, e.g. `25,50`.
    #[arg(long = "M")]
    pub m: Option<String>,
    /// Failure-rate threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub trials: TrialArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub trials: TrialArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated ensembles; defaults to the seven-ensemble set.
    #[arg(long)]
    pub ensembles: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub trials: TrialArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Where a successful run wrote its files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

pub fn execute(command: Command) -> Result<RunOutput, CliError> {
    commands::execute(command)
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 on runtime failure, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            eprintln!("wrote {} and {}", out.csv.display(), out.manifest.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
