use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// Two operands live over different variable sets, or a variable is unknown.
    #[error("context error: {0}")]
    Context(String),

    #[error("parity error: {0}")]
    Parity(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A truncation window or ansatz degree was too small for the answer to settle.
    #[error("{what} did not stabilize; retry with window/bound >= {suggested}")]
    Instability { what: String, suggested: usize },

    /// An internal identity that must hold exactly was violated.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("bracket {bracket} is not in the span of the basis (residual {residual})")]
    NotClosed { bracket: String, residual: String },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),
}
