use thiserror::Error;

/// Errors reported by the engine. Validation failures carry enough context to
/// name the offending instance (e.g. the four indices of a failing pentagon).
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is not invertible")]
    NotInvertible,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("pentagon fails at simples (i={0}, j={1}, k={2}, l={3})")]
    Pentagon(usize, usize, usize, usize),

    #[error("cocycle condition fails at ({0}, {1}, {2}, {3})")]
    NotCocycle(usize, usize, usize, usize),

    #[error(
        "functor expressions are not commensurable: left normal form {0}, right normal form {1}"
    )]
    NotCommensurable(String, String),

    #[error("degree out of range: {0}")]
    Degree(String),

    #[error("boundary bidegrees require unit and counit data")]
    NonBiunital,

    #[error("cochain is not closed at degree {0}")]
    NotClosed(usize),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
