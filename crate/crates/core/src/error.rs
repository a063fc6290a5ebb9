use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{context}: matrix must be square, got {rows}x{cols}")]
    NotSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A requested detuning (or other control value) lies outside the window
    /// for which the closed-form protocol reaches its target.
    #[error(
        "infeasible {what}: requested {requested} outside admissible interval [{lower}, {upper}]"
    )]
    Infeasible {
        what: String,
        requested: f64,
        lower: f64,
        upper: f64,
    },

    #[error("unknown name `{0}`")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;
