//! One error type for the whole binary, carrying the process exit code.
//!
//! Exit codes: 0 success (or a success prediction from `assess`),
//! 1 a failure prediction from `assess`, 2 unusable input or invalid
//! invocation, 3 training data with only one outcome class.

use std::path::PathBuf;

use map_core::align::AlignError;
use map_core::features::FeatureError;
use map_core::gp::ComponentFitError;
use map_core::trajectory::{Label, TrajectoryError};
use thiserror::Error;

pub const EXIT_PREDICTED_FAILURE: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_SINGLE_CLASS: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    /// Malformed CSV content; `row` counts data rows from 1, row 0 is
    /// the header.
    #[error("{}: row {row}: {message}", path.display())]
    Csv { path: PathBuf, row: usize, message: String },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("{}: {source}", path.display())]
    Trajectory { path: PathBuf, source: TrajectoryError },

    #[error("no demonstration found under {}", dir.display())]
    MissingDemo { dir: PathBuf },

    #[error("{count} demonstrations under {}; expected exactly one", dir.display())]
    AmbiguousDemo { dir: PathBuf, count: usize },

    #[error("no reproductions under {}", dir.display())]
    NoReps { dir: PathBuf },

    #[error("{}: reproduction is unlabeled; training needs outcomes", path.display())]
    UnlabeledRep { path: PathBuf },

    #[error("{dir} already exists and is not empty; pass --force to write into it")]
    TargetNotEmpty { dir: String },

    #[error("every training reproduction is labeled {}; need both outcomes", .0.as_str())]
    SingleClass(Label),

    #[error("cross-demo evaluation needs at least two --dataset directories, got {0}")]
    NeedTwoDatasets(usize),

    #[error("{id}: {source}")]
    Align { id: String, source: AlignError },

    #[error("{id}: {source}")]
    Fit { id: String, source: ComponentFitError },

    #[error("{id}: {source}")]
    Feature { id: String, source: FeatureError },

    #[error("cross-validation failed: {0}")]
    Loocv(map_core::classifier::LoocvError),

    #[error("{}: {message}", path.display())]
    ModelMismatch { path: PathBuf, message: String },

    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SingleClass(_) => EXIT_SINGLE_CLASS,
            _ => EXIT_INVALID_INPUT,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> CliError {
        CliError::Io { path: path.to_path_buf(), source }
    }
}
