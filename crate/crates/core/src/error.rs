use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A weight evaluated to 1 under the chosen specialization, so its theta
    /// factor has a vanishing denominator.
    #[error("degenerate specialization (seed {seed}): weight {weight} evaluates to {value}")]
    DegenerateSpecialization { seed: u64, weight: String, value: String },

    #[error("trivial weight in tangent character: {0}")]
    TrivialWeight(String),

    #[error("dimension check failed for {context}: expected rank {expected}, got {actual}")]
    DimensionMismatch {
        context: String,
        expected: i64,
        actual: i64,
    },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("series is not invertible: no unit coefficient below order {order}")]
    InvertNonUnit { order: i64 },

    #[error("coefficient of q^{exponent} requested beyond truncation order {order}")]
    BeyondOrder { exponent: i64, order: i64 },

    #[error("non-integral exponent: {0}")]
    IntegralityViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coefficient type cannot represent y mode {0}")]
    ModeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}
