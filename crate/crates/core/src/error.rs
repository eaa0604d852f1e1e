use thiserror::Error;

/// Errors produced anywhere in the selection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column {column} is constant")]
    ConstantColumn { column: usize },
    #[error("column {column}: category `{level}` has no observations")]
    EmptyCategory { column: usize, level: String },
    #[error("qualitative column {column} has fewer than two observed categories")]
    DegenerateQualitative { column: usize },
    #[error("invalid penalty specification: {0}")]
    InvalidSpec(String),
    #[error("thresholding subproblem has no unique minimizer (step weight {step_weight}, gamma {gamma})")]
    IllPosed { step_weight: f64, gamma: f64 },
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("logistic loss requires a binary 0/1 response")]
    NonBinaryResponse,
    #[error("group {group} has no columns")]
    EmptyGroup { group: usize },
    #[error("{n} observations cannot be split into {folds} folds")]
    TooFewObservations { n: usize, folds: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("vector is constant")]
    ConstantVector,
    #[error("distance covariance of a margin is zero")]
    DegenerateMargin,
    #[error("screening retained no variables")]
    EmptyScreenResult,
    #[error("AUC is undefined when only one class is present")]
    OneClassOnly,
    #[error("{minority} minority rows cannot supply {k} neighbours")]
    TooFewMinority { minority: usize, k: usize },
    #[error("invalid simulation design: {0}")]
    InvalidDesign(String),
    #[error("bootstrap resample stayed degenerate after {retries} retries")]
    ResampleFailed { retries: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Usage and validation failures (bad input, bad parameters) as opposed
    /// to numerical failures on otherwise valid input.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::IllPosed { .. }
                | Error::DegenerateInput(_)
                | Error::ResampleFailed { .. }
                | Error::DegenerateMargin
                | Error::ConstantVector
        )
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
