use thiserror::Error;

use crate::gaussian_oracle::OracleError;
use crate::gem_core::GemError;
use crate::knot_gem::KnotError;
use crate::loop_solver::LoopError;
use crate::melonic_series::SeriesError;
use crate::mo_graphs::MoError;
use crate::scaling_limits::ScalingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Domain,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Domain => 1,
            ErrorKind::Internal => 70,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Gem(#[from] GemError),
    #[error(transparent)]
    Mo(#[from] MoError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Knot(#[from] KnotError),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        let internal = match self {
            Error::Usage(_) => return ErrorKind::Usage,
            Error::Io(_) | Error::Json(_) => false,
            Error::Gem(e) => e.is_internal(),
            Error::Mo(e) => matches!(e, MoError::MismatchedRoutes(_)),
            Error::Series(_) => false,
            Error::Oracle(e) => e.is_internal(),
            Error::Scaling(e) => e.is_internal(),
            Error::Loop(e) => e.is_internal(),
            Error::Knot(e) => e.is_internal(),
            Error::Internal(_) => true,
        };
        if internal {
            ErrorKind::Internal
        } else {
            ErrorKind::Domain
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind().exit_code()
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Error::Usage("x".into()).exit_code(), 2);
        assert_eq!(Error::from(GemError::NotClosed).exit_code(), 1);
        assert_eq!(Error::from(KnotError::AlgorithmAssertion("x".into())).exit_code(), 70);
    }
}
