use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid ordinal map: {0}")]
    InvalidMap(String),
    #[error("map is not surjective: {0}")]
    NotSurjective(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid simplicial set: {0}")]
    InvalidSet(String),
    #[error("invalid simplicial map: {0}")]
    InvalidMorphism(String),
    #[error("not a levelwise injection on non-degenerate cells: {0}")]
    NotInjective(String),
    #[error("invalid category data: {0}")]
    InvalidCategory(String),
    #[error("truncation too low: {0}")]
    Truncation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
