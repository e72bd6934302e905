use thiserror::Error;

use crate::scalar::Mode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("negative weight {weight} at atom {index}")]
    NegativeWeight { index: usize, weight: String },
    #[error("total mass {total} is not 1")]
    MassNotOne { total: String },
    #[error("a measure needs at least one atom with positive weight")]
    EmptyMeasure,
    #[error("dimension {0} exceeds the supported maximum of 16")]
    DimensionTooLarge(usize),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("assignment covers {got} atoms but the measure has {expected}")]
    IncompleteAssignment { expected: usize, got: usize },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unbounded objective")]
    Unbounded,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("size limit exceeded: {0}")]
    SizeLimitExceeded(String),
    #[error("cost variant `{0}` is not differentiable")]
    NonDifferentiableCost(&'static str),
    #[error("disintegration base does not match the measure")]
    BaseMismatch,
    #[error("plans do not share a source measure")]
    SourceMismatch,
    #[error("cost variant `{0}` is not supported here")]
    UnsupportedCostVariant(&'static str),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("mixed numeric modes: expected {expected}, found {found}")]
    ModeMismatch { expected: Mode, found: Mode },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid input at `{field}`: {message}")]
    Parse { field: String, message: String },
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}
