//! `map`: generate, train on, assess, and evaluate movement datasets.
//!
//! Exit codes: 0 success (for `assess`, a success prediction), 1 a
//! failure prediction from `assess`, 2 unusable input or bad invocation,
//! 3 training data containing only one outcome class.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use map_core::classifier::DEFAULT_SIGMA_FLOOR;
use map_core::synth::{FailureMode, Task};

use map_cli::error::CliError;
use map_cli::pipeline::{
    cmd_assess, cmd_eval, cmd_generate, cmd_train, AssessArgs, EvalArgs, EvalMode, FitOptions,
    GenerateArgs, OutFormat, TrainArgs,
};

#[derive(Parser)]
#[command(name = "map", version, about = "Movement assessment over wrench models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset: one demonstration plus labeled reproductions.
    Generate {
        #[arg(long, value_parser = ["snapfit", "screwing"])]
        task: String,
        #[arg(long, default_value_t = 41)]
        seed: u64,
        /// Dataset directory to create.
        #[arg(long)]
        out: PathBuf,
        /// Reproduction count; failures take the floored half.
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Samples per trajectory (default: task-specific).
        #[arg(long)]
        samples: Option<usize>,
        /// Start offset standard deviation in meters (default: task-specific).
        #[arg(long)]
        start_jitter: Option<f64>,
        /// Failure shape; `mixed` cycles through the task's modes.
        #[arg(long, default_value = "mixed", value_parser = ["mixed", "jam", "miss", "loose"])]
        failure_mode: String,
        /// Write into a non-empty target directory.
        #[arg(long)]
        force: bool,
    },
    /// Fit the demonstration models and train the outcome classifier.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        /// Model output path (default: `<dataset>/model.json`).
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIGMA_FLOOR)]
        sigma_floor: f64,
        /// Pair samples one-to-one instead of time warping.
        #[arg(long)]
        no_dtw: bool,
        /// Fit wrench components sequentially.
        #[arg(long)]
        no_parallel: bool,
    },
    /// Classify one reproduction under a trained model.
    Assess {
        /// Dataset the model was trained on (its demonstration is needed).
        #[arg(long)]
        dataset: PathBuf,
        /// Model path (default: `<dataset>/model.json`).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Reproduction CSV to assess.
        trajectory: PathBuf,
    },
    /// Score classification over whole datasets.
    Eval {
        /// Dataset directory; repeat for cross-demo evaluation.
        #[arg(long, required = true)]
        dataset: Vec<PathBuf>,
        /// `loocv` cross-validates the first dataset; `cross-demo` trains
        /// on the first and evaluates the rest.
        #[arg(long, default_value = "loocv", value_parser = ["loocv", "cross-demo"])]
        mode: String,
        /// Report directory (default: `<first dataset>/reports`).
        #[arg(long)]
        report_dir: Option<PathBuf>,
        /// What to print on stdout; all formats are written regardless.
        #[arg(long, default_value = "text", value_parser = ["text", "csv", "json"])]
        out_format: String,
        #[arg(long, default_value_t = DEFAULT_SIGMA_FLOOR)]
        sigma_floor: f64,
        #[arg(long)]
        no_dtw: bool,
        #[arg(long)]
        no_parallel: bool,
    },
}

fn parse_failure_mode(s: &str) -> Option<FailureMode> {
    match s {
        "mixed" => None,
        "jam" => Some(FailureMode::Jam),
        "miss" => Some(FailureMode::Miss),
        "loose" => Some(FailureMode::Loose),
        other => unreachable!("clap rejects {other:?}"),
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Generate {
            task,
            seed,
            out,
            reps,
            samples,
            start_jitter,
            failure_mode,
            force,
        } => cmd_generate(&GenerateArgs {
            task: Task::from_str(&task).expect("clap validated the task"),
            seed,
            out,
            reps,
            samples,
            start_jitter,
            failure_mode: parse_failure_mode(&failure_mode),
            force,
        }),
        Command::Train { dataset, model, sigma_floor, no_dtw, no_parallel } => {
            cmd_train(&TrainArgs {
                dataset,
                model,
                opts: FitOptions {
                    dtw_enabled: !no_dtw,
                    sigma_floor,
                    parallel: !no_parallel,
                },
            })
        }
        Command::Assess { dataset, model, trajectory } => {
            cmd_assess(&AssessArgs { dataset, model, trajectory })
        }
        Command::Eval {
            dataset,
            mode,
            report_dir,
            out_format,
            sigma_floor,
            no_dtw,
            no_parallel,
        } => cmd_eval(&EvalArgs {
            datasets: dataset,
            mode: match mode.as_str() {
                "loocv" => EvalMode::Loocv,
                _ => EvalMode::CrossDemo,
            },
            report_dir,
            out_format: match out_format.as_str() {
                "csv" => OutFormat::Csv,
                "json" => OutFormat::Json,
                _ => OutFormat::Text,
            },
            opts: FitOptions {
                dtw_enabled: !no_dtw,
                sigma_floor,
                parallel: !no_parallel,
            },
        }),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("map: error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
