use thiserror::Error;

use crate::shape::Shape;

/// Errors raised by tensor construction, the broadcast operators and the solvers.
///
/// Mode numbers in messages are 1-based (mode 1 is the first mode).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("shape {shape} holds {expected} elements but {actual} values were supplied")]
    LengthMismatch {
        shape: Shape,
        expected: usize,
        actual: usize,
    },

    #[error("shapes {left} and {right} do not satisfy the broadcast condition at mode {mode}")]
    Incompatible {
        left: Shape,
        right: Shape,
        /// 1-based.
        mode: usize,
    },

    #[error("divisor has a zero element at linear index {index}")]
    DivisionByZero { index: usize },

    #[error("mode {mode} is out of range for an order-{order} tensor")]
    ModeOutOfRange {
        /// 1-based.
        mode: usize,
        order: usize,
    },

    #[error("{0:?} is not a permutation of the modes")]
    InvalidPermutation(Vec<usize>),

    #[error("invalid mode grouping: {0}")]
    InvalidGrouping(String),

    #[error("singular least-squares problem: zero denominator at linear index {index} of the unknown")]
    Singular { index: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("malformed BTF input at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
