use thiserror::Error;

/// Errors raised by sequence construction, verification and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus q = {0} must be an even integer >= 2")]
    OddModulus(u32),

    #[error("variable count m = {m} out of range (supported {min}..={max})")]
    VariableCount { m: usize, min: usize, max: usize },

    #[error("variable index x_{index} outside 1..={m}")]
    VariableIndex { index: usize, m: usize },

    #[error("index {index} out of range for a function of {m} variables")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("phase value {value} outside Z_{q}")]
    PhaseOutOfRange { value: u32, q: u32 },

    #[error("entry {index} has magnitude {magnitude}, expected 0 or 1")]
    NotUnimodular { index: usize, magnitude: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("{family} requires {requirement}")]
    PermutationConstraint {
        family: &'static str,
        requirement: &'static str,
    },

    #[error("expected {expected} coefficients c_k, got {got}")]
    CoefficientCount { expected: usize, got: usize },

    #[error("sequence lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("sequence set is empty")]
    EmptySet,

    #[error("sequence has zero energy")]
    ZeroSequence,

    #[error("oversampling factor {0} below the minimum of 4")]
    Oversampling(usize),

    #[error("grid needs at least 2 points, got {0}")]
    TracePoints(usize),

    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),

    #[error("sequence length {0} is not divisible by 4 resource blocks")]
    LengthNotDivisibleBy4(usize),

    #[error("mask index {0} outside 1..=15")]
    MaskIndex(u8),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("root {root} is not coprime to length {length}")]
    NonCoprimeRoot { root: u64, length: u64 },

    #[error("Zadoff-Chu length {0} must be odd")]
    EvenZcLength(u64),

    #[error("invalid LFSR configuration: {0}")]
    Lfsr(String),

    #[error("wrong family: {operation} needs {expected}")]
    WrongFamily {
        operation: &'static str,
        expected: &'static str,
    },

    #[error("missing baseline parameter: {0}")]
    MissingBaseline(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
