use std::io;

/// Errors produced by the simulator and the analysis routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid constellation order {0}")]
    InvalidOrder(usize),

    #[error("expected {expected} label bits, got {got}")]
    BitLength { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate link: zero channel gain")]
    DegenerateLink,

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    NumericFailure { achieved: f64, requested: f64 },

    #[error("distribution grid too coarse: pdf integrates to {integral}")]
    GridResolution { integral: f64 },

    #[error("{0}")]
    Usage(String),

    #[error("no result points to write")]
    EmptyResult,

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_)
            | Error::InvalidOrder(_)
            | Error::InvalidParameter(_)
            | Error::BitLength { .. } => 2,
            Error::NumericFailure { .. } | Error::GridResolution { .. } | Error::DegenerateLink => 3,
            Error::Io(_) => 4,
            Error::EmptyResult => 5,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
