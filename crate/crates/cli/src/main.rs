//! `gmelab`: train the four-network model on the synthetic benchmark, run
//! the brute-force oracle suites, verify trained checkpoints, and collect
//! plot-ready CSV bundles.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use errors::CliError;

mod errors {
    use gmelab_core::gmegan::TrainError;
    use gmelab_core::measures::MeasureError;
    use gmelab_core::nd::NdError;
    use gmelab_core::ot::OtError;
    use gmelab_core::verify::VerifyError;

    #[derive(Debug)]
    pub enum CliError {
        Config(String),
        TrainingAborted(String),
        OracleFailed(String),
        MissingArtifacts(Vec<String>),
        Other(String),
    }

    impl std::fmt::Display for CliError {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            match self {
                CliError::Config(m) => write!(f, "config error: {m}"),
                CliError::TrainingAborted(m) => write!(f, "training aborted: {m}"),
                CliError::OracleFailed(m) => write!(f, "oracle failure: {m}"),
                CliError::MissingArtifacts(list) => {
                    write!(f, "missing artifacts: {}", list.join(", "))
                }
                CliError::Other(m) => write!(f, "{m}"),
            }
        }
    }

    impl std::error::Error for CliError {}

    impl From<std::io::Error> for CliError {
        fn from(e: std::io::Error) -> Self {
            CliError::Other(format!("io error: {e}"))
        }
    }
    impl From<MeasureError> for CliError {
        fn from(e: MeasureError) -> Self {
            CliError::Other(e.to_string())
        }
    }
    impl From<NdError> for CliError {
        fn from(e: NdError) -> Self {
            CliError::Other(e.to_string())
        }
    }
    impl From<OtError> for CliError {
        fn from(e: OtError) -> Self {
            CliError::Other(e.to_string())
        }
    }
    impl From<VerifyError> for CliError {
        fn from(e: VerifyError) -> Self {
            CliError::Other(e.to_string())
        }
    }
    impl From<TrainError> for CliError {
        fn from(e: TrainError) -> Self {
            CliError::Other(e.to_string())
        }
    }
    impl From<serde_json::Error> for CliError {
        fn from(e: serde_json::Error) -> Self {
            CliError::Other(format!("json error: {e}"))
        }
    }
}

// Exit-code contract: 0 success, 1 oracle failure or missing artifacts,
// 2 configuration error, 3 training abort.

#[derive(Parser)]
#[command(name = "gmelab", version, about = "Geometry-preserving encoder GAN lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on a configured dataset; writes history, checkpoints,
    /// generated samples, and a summary.
    Train {
        /// Run configuration file (sectioned key-value text).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for run artifacts.
        #[arg(long, default_value = "run")]
        out: PathBuf,
        /// Seed override (also overridable via GMEGAN_SEED).
        #[arg(long)]
        seed: Option<u64>,
        /// Iteration-count override.
        #[arg(long)]
        iterations: Option<usize>,
        /// Zero out one regularizer: gme (lambda1), gp (lambda2), recon (lambda3).
        #[arg(long)]
        ablate: Option<String>,
    },
    /// Run a randomized oracle suite; exit 1 on any hard-gate failure.
    Oracle {
        /// Suite name or "all".
        suite: String,
        /// Instances to draw.
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Base seed for instance generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sawtooth tooth count for the gk suite (runs {0,2,5} when absent).
        #[arg(long)]
        k: Option<usize>,
        /// Write the JSON report here as well as stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagnostics on a trained checkpoint against a dataset.
    Verify {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Run configuration (for the mixture layout and probe sizes).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "run")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Collect a run directory's CSVs into a plot bundle with a manifest.
    EmitPlots {
        /// Directory holding the train/verify artifacts.
        run_dir: PathBuf,
        /// Bundle directory (defaults to `<run_dir>/plots`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train {
            config,
            out,
            seed,
            iterations,
            ablate,
        } => commands::train::run(config.as_deref(), &out, seed, iterations, ablate.as_deref()),
        Command::Oracle {
            suite,
            count,
            seed,
            k,
            out,
        } => commands::oracle::run(&suite, count, seed, k, out.as_deref()),
        Command::Verify {
            checkpoint,
            dataset,
            config,
            out,
            seed,
        } => commands::verify::run(&checkpoint, &dataset, config.as_deref(), &out, seed),
        Command::EmitPlots { run_dir, out } => commands::emit_plots::run(&run_dir, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                CliError::Config(_) => 2,
                CliError::TrainingAborted(_) => 3,
                CliError::OracleFailed(_) | CliError::MissingArtifacts(_) => 1,
                CliError::Other(_) => 1,
            };
            ExitCode::from(code)
        }
    }
}
