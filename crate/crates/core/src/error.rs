use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Pivot fell below `dim * eps * max|A|` during factorization.
    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e} at step {step}")]
    SingularMatrix {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("full-order operator is singular at sample {sample}")]
    SingularAtSample { sample: String },

    #[error("reduced operator is singular at sample {sample}")]
    SingularReducedSystem { sample: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("sample point is missing parameter `{0}`")]
    MissingParameter(String),

    #[error("parameter `{0}` is zero but raised to a negative power")]
    ZeroToNegativePower(String),

    #[error("unknown parameter name `{0}`")]
    UnknownParameterName(String),

    #[error("system is not first order in `s`: {0}")]
    NotFirstOrder(String),

    #[error("estimator {kind} needs the {rom} reduced model, which the workspace lacks")]
    MissingWorkspaceRom { kind: String, rom: &'static str },

    #[error("every training sample is singular")]
    AllSamplesSingular,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}:{line}: {msg}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn parse(file: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for the singularity variants, which callers may treat as "skip this sample".
    pub fn is_singular(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. }
                | Error::SingularAtSample { .. }
                | Error::SingularReducedSystem { .. }
        )
    }
}
