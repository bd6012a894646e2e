use thiserror::Error;

/// Errors raised by the norm library.
///
/// Numerical verdicts (a failed inequality, an invalid partition of unity)
/// are reported in result structs, not here. These variants are reserved for
/// inputs that violate an operation's preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure space has no points")]
    EmptySpace,

    #[error("weight {weight} at point {point} is not a positive finite number")]
    InvalidWeight { point: i64, weight: f64 },

    #[error("point identifier {0} is duplicated")]
    DuplicatePoint(i64),

    #[error("point identifiers must be strictly increasing (found {next} after {prev})")]
    UnorderedPoints { prev: i64, next: i64 },

    #[error("value at point {point} is not finite")]
    NonFiniteValue { point: i64 },

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("functions live on different measure spaces")]
    SpaceMismatch,

    #[error("Lebesgue exponent {0} is below 1")]
    ExponentBelowOne(f64),

    #[error("grand exponent requires 1 < p < inf and theta >= 0 (got p = {p}, theta = {theta})")]
    InvalidGrandExponent { p: f64, theta: f64 },

    #[error("epsilon {eps} lies outside (0, {upper}]")]
    EpsilonOutOfRange { eps: f64, upper: f64 },

    #[error("invalid epsilon grid: {0}")]
    InvalidGrid(String),

    #[error("epsilon grid ends at {grid_upper} but the exponent needs p - 1 = {expected}")]
    GridMismatch { grid_upper: f64, expected: f64 },

    #[error("sequence norms need counting measure (weight {weight} at point {point})")]
    NotCountingMeasure { point: i64, weight: f64 },

    #[error("window must contain at least one point of the space")]
    EmptyWindow,

    #[error("point {0} is not in the measure space")]
    UnknownPoint(i64),

    #[error("translates {first} and {second} of the window overlap")]
    OverlappingTranslates { first: usize, second: usize },

    #[error("translate {0} of the window misses the space entirely")]
    EmptyTranslate(usize),

    #[error("block size must be positive")]
    InvalidBlockSize,

    #[error("invalid partition of unity: {0}")]
    InvalidBupu(String),

    #[error("partition of unity has a ragged final block")]
    RaggedBupu,

    #[error("group factors must all be at least 1 (got {0:?})")]
    InvalidGroup(Vec<usize>),

    #[error("space is not a finite abelian group")]
    NotAGroup,

    #[error("witness needs m >= 2 and p > 1 (got m = {m}, p = {p})")]
    InvalidWitness { m: usize, p: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
