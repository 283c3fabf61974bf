use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate matrix")]
    DegenerateMatrix,
    #[error("spectrum not resolved")]
    SpectrumNotResolved,
    #[error("exterior degree {k} out of range for dimension {d}")]
    ExteriorDegree { k: usize, d: usize },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("power iteration unstable")]
    PowerIterationUnstable,
    #[error("weight split undefined: element is not loxodromic at root {k}")]
    WeightSplitUndefined { k: usize },
    #[error("projection unreliable: eigenbasis condition number {condition:.3e}")]
    ProjectionUnreliable { condition: f64 },
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("flag type mismatch: {0}")]
    FlagTypeMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("word budget exceeded: {count} words > cap {cap}")]
    WordBudget { count: u64, cap: u64 },
    #[error("insufficient decay window: {usable} usable iterates (need 4)")]
    InsufficientDecayWindow { usable: usize },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("no common loxodromic word found")]
    NoCommonLoxodromic,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
