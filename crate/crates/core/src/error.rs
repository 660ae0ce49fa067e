use thiserror::Error;

use crate::scalars::Exponent;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("the q-divisor is not zero, so no form c*z^m*b(qz)/b(z) exists")]
    NotQTrivial,

    #[error("exponent `{0}` is not rational")]
    IrrationalExponent(String),

    #[error("series generation needs beta_1 = 1 (b_1 = q), got `{0}`")]
    Normalization(String),

    #[error("degenerate operator: {0}")]
    DegenerateOperator(String),

    #[error("resonance: the recursion pivot vanishes at exponent {index}")]
    Resonance { index: Exponent },

    #[error("indicial equation has no monomial root: {0}")]
    NonMonomialIndicial(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("parse error at {line}:{column}: expected {expected}")]
    Parse {
        line: usize,
        column: usize,
        expected: String,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Stable machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::NotQTrivial => "NotQTrivial",
            Error::IrrationalExponent(_) => "IrrationalExponent",
            Error::Normalization(_) => "NormalizationError",
            Error::DegenerateOperator(_) => "DegenerateOperator",
            Error::Resonance { .. } => "Resonance",
            Error::NonMonomialIndicial(_) => "NonMonomialIndicial",
            Error::SingularMatrix => "SingularA",
            Error::Parse { .. } => "ParseError",
            Error::Capacity(_) => "CapacityError",
            Error::Invalid(_) => "InvalidInput",
        }
    }
}
