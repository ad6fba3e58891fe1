//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::multiindex::MultiIndex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error("variable count mismatch: {0} vs {1}")]
    NvarsMismatch(usize, usize),

    #[error("multi-index length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("division by zero in the coefficient field")]
    DivisionByZero,

    #[error("denominator {denominator} of coefficient at entry ({row},{col}), derivative index {deriv}, is divisible by {p}")]
    BadDenominator {
        row: usize,
        col: usize,
        deriv: MultiIndex,
        denominator: String,
        p: u64,
    },

    #[error("factorial of derivative index {0} is zero in characteristic {1}")]
    FactorialNotInvertible(MultiIndex, u64),

    #[error("operation requires characteristic zero, got characteristic {0}")]
    CharacteristicP(u64),

    #[error("oracle does not agree with any operator of order <= {0}")]
    NotOrderBounded(usize),

    #[error("supplied inverse fails validation: {0}")]
    InverseValidation(String),

    #[error("diagonal entry {0} is the zero polynomial")]
    ZeroDiagonal(usize),

    #[error("entry ({0},{1}) must have zero order-0 coefficient")]
    ConstantTermViolation(usize, usize),

    #[error("sample value at parameter {0} violates the family's vanishing pattern")]
    PatternViolation(String),

    #[error("family mode requires {0}")]
    UnsupportedFamily(String),

    #[error("coefficients are not all integers: {0}")]
    NonIntegerCoefficient(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
