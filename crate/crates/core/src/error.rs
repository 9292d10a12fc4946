use num_bigint::BigUint;
use thiserror::Error;

/// Malformed arguments to any entry point.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("composition must have at least one part")]
    EmptyComposition,
    #[error("composition part {position} is not positive")]
    NonPositivePart { position: usize },
    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("slot ({row},{col}) value {value} outside [0, {bound})")]
    OutOfRange { row: usize, col: usize, value: u64, bound: u64 },
    #[error("pair ({0},{1}) is not a valid column pair")]
    InvalidPair(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Failures of an exhaustive count.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("search space {search_space} exceeds budget {budget}")]
    BudgetExceeded { search_space: BigUint, budget: u128 },
    #[error("count cancelled before completion")]
    Cancelled,
    #[error(transparent)]
    Input(#[from] InputError),
}

/// Failures when evaluating a closed form.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{formula}: numerator {numerator} not divisible by {denominator} at p = {p}")]
    NotDivisible {
        formula: String,
        p: u64,
        numerator: String,
        denominator: String,
    },
    #[error("{formula}: parameters out of range: {reason}")]
    OutOfRange { formula: String, reason: String },
    #[error("{formula}: evaluates to a negative value {value} at p = {p}")]
    Negative { formula: String, p: u64, value: String },
    #[error("unknown formula {0:?}")]
    Unknown(String),
    #[error("local factor only available for n in {{2,3,4}}, got {0}")]
    UnsupportedDimension(usize),
}

/// Failures loading or counting a polynomial system.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error("schema violation at {position}: {message}")]
    Schema { position: String, message: String },
    #[error("unknown builtin system {0:?}")]
    UnknownBuiltin(String),
    #[error("point space {search_space} exceeds budget {budget}")]
    BudgetExceeded { search_space: BigUint, budget: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("duplicate prime {0} in sample")]
    DuplicatePrime(u64),
}

/// Failure evaluating one target at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TargetError {
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
}

/// A probe that stopped early. Counts gathered before the failure are kept.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("evaluation at p = {prime} failed after {} samples: {source}", partial.len())]
    Evaluation {
        prime: u64,
        partial: Vec<crate::fitfind::SamplePoint>,
        source: TargetError,
    },
    #[error(transparent)]
    Fit(#[from] FitError),
}
