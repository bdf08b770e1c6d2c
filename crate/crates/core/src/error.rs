//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library boundary.
///
/// Contract violations inside pure polynomial arithmetic (dimension or axis
/// mismatches between values the caller constructed) panic instead; every
/// error that can be triggered by user input or by floating-point rank loss
/// is reported through this enum.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weight parameters: {0}")]
    InvalidWeight(String),
    #[error("numerical rank deficiency while orthogonalizing degree {degree}: pivot {pivot:.3e} below 1e-13")]
    RankDeficient { degree: u32, pivot: f64 },
    #[error("degree {requested} out of range (basis holds degrees up to {max})")]
    DegreeOutOfRange { requested: i64, max: u32 },
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("unsupported function/operation combination: {0}")]
    Unsupported(String),
    #[error("non-integrable exponent shift: axis {axis} has gamma + theta = {value} <= -1")]
    NonIntegrable { axis: usize, value: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
