use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("non-finite state encountered at t = {time}")]
    NonFinite { time: f64 },

    #[error("x[{index}] = {value:e} lies on the simplex boundary; the entropy rate is undefined there")]
    Boundary { index: usize, value: f64 },

    #[error("target energy {target} is infeasible: must be strictly {side} {bound}")]
    Infeasible {
        target: f64,
        side: &'static str,
        bound: f64,
    },

    #[error("degenerate {what}: {reason}")]
    Degenerate { what: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn check_dim(context: &'static str, expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected,
                actual,
            })
        }
    }
}
