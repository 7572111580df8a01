//! `vqcredit` command-line tool: synthetic data, training, classification,
//! evaluation and entanglement analysis.
//!
//! Progress goes to standard error; artifacts go to the requested files or
//! to standard output. Exit codes: 0 success, 1 usage error, 2 data error,
//! 3 numeric failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vqcredit::classify::DistanceMode;
use vqcredit::training::{Method, DEFAULT_CLUSTERS_PER_CLASS, DEFAULT_MARGIN};
use vqcredit::{Error, Variant};

#[derive(Parser, Debug)]
#[command(name = "vqcredit", version, about = "Variational pattern-state classifier for credit-sales risk")]
struct Cli {
    /// Worker threads for training and classification (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Only print warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a labelled synthetic dataset as CSV.
    GenerateData(GenerateArgs),
    /// Train pattern states and write a model file.
    Train(TrainArgs),
    /// Classify observations and write a per-sample report.
    Classify(ClassifyArgs),
    /// Print accuracy and false-classification rate of a model on labelled data.
    Evaluate(ClassifyArgs),
    /// Summarize entangled qubit groups of the encoded observations per class.
    DetectEntanglement(EntanglementArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of observations.
    #[arg(long, default_value_t = 80)]
    count: usize,
    /// Output CSV (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Input CSV and the slice of its rows to use.
#[derive(Args, Debug)]
struct DataArgs {
    /// CSV with header x1,x2,x3,x4,x5,x6,x7,y.
    #[arg(long)]
    data: PathBuf,
    /// Skip this many leading rows.
    #[arg(long, default_value_t = 0)]
    skip: usize,
    /// Use at most this many rows after skipping.
    #[arg(long)]
    take: Option<usize>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Ansatz variant: A (RY + CZ ladder) or B (CNOT/RY ladder).
    #[arg(long, default_value = "A")]
    variant: Variant,
    #[arg(long, default_value_t = 2)]
    layers: usize,
    /// Optimizer: spsa or nelder-mead.
    #[arg(long, default_value = "spsa")]
    optimizer: Method,
    /// Optimizer iterations per restart.
    #[arg(long, default_value_t = 500)]
    iters: usize,
    /// Random starts per cluster; the best one is kept.
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Seed for clustering, initial angles and SPSA directions.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// SPSA step gain a.
    #[arg(long, default_value_t = 0.2)]
    spsa_a: f64,
    /// SPSA perturbation gain c.
    #[arg(long, default_value_t = 0.1)]
    spsa_c: f64,
    /// SPSA stability constant A.
    #[arg(long = "spsa-stability", default_value_t = 50.0)]
    spsa_stability: f64,
    /// SPSA step decay exponent α.
    #[arg(long, default_value_t = 0.602)]
    spsa_alpha: f64,
    /// SPSA perturbation decay exponent γ.
    #[arg(long, default_value_t = 0.101)]
    spsa_gamma: f64,
    /// Clusters per class.
    #[arg(long, default_value_t = DEFAULT_CLUSTERS_PER_CLASS)]
    lc: usize,
    /// COST_F, SWAP_GLOBAL or SWAP_PER_QUBIT.
    #[arg(long, default_value = "COST_F")]
    distance_mode: DistanceMode,
    /// Measurement shots per cost evaluation; 0 uses exact probabilities.
    #[arg(long, default_value_t = 0)]
    shots: u64,
    /// Tune acceptance thresholds on the training data.
    #[arg(long)]
    tune_epsilon: bool,
    /// Slack over the widest member distance when tuning.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    /// Record the creation time in the model (makes the file non-reproducible).
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Model JSON written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Report file: JSON if it ends in .json, CSV otherwise (standard output
    /// as JSON if omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EntanglementArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output JSON (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Lib(Error::InvalidInput(_)) => 1,
            Failure::Lib(Error::NonFinite { .. }) => 3,
            Failure::Lib(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => f.write_str(msg),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "warn" } else { "info" }))
        .format_target(false)
        .format_timestamp(None)
        .init();

    let result = match cli.jobs {
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Usage(format!("cannot start {n} worker threads: {e}")))
            .and_then(|pool| pool.install(|| commands::run(cli.command))),
        None => commands::run(cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
