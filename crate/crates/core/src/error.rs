use thiserror::Error;

/// Errors raised by matrix arithmetic, decompositions, generators and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular under the numeric policy")]
    Singular,

    #[error("core-nilpotent similarity is ill-conditioned (condition {condition:.3e} > {limit:.3e})")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("instance generation failed: {0}")]
    GenerationFailed(String),

    #[error("tolerance inconsistency: defect vanished at order {zero_at} but not at order {order}")]
    ToleranceInconsistency { zero_at: usize, order: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid numeric policy: {0}")]
    InvalidPolicy(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// 1 for usage and parse problems, 2 for numerical breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::IllConditioned { .. }
            | Error::Singular
            | Error::ToleranceInconsistency { .. }
            | Error::GenerationFailed(_)
            | Error::NoConvergence(_) => 2,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
