use thiserror::Error;

use crate::HalfInt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spin: {0}")]
    InvalidSpin(String),

    #[error("angle {value} outside [{min}, {max}]")]
    InvalidAngle { value: f64, min: f64, max: f64 },

    #[error("dimension too large: {what} = {value} exceeds {limit}")]
    DimensionTooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("mismatched lengths: {left} settings vs {right} frames")]
    MismatchedLengths { left: usize, right: usize },

    #[error("no violating frame up to j_RF = {cap} (best S = {best_s})")]
    NotFoundBelowCap { cap: HalfInt, best_s: f64 },

    #[error("violation is not monotone in j_RF near 2j_RF = {two_j_rf}")]
    NonMonotoneBoundary { two_j_rf: i64 },

    #[error("no threshold exists: {0}")]
    NoThresholdExists(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
}
