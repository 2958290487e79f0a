use thiserror::Error;

/// Errors produced by the toolkit.
///
/// The variants map onto the CLI exit codes: `Resource` is a budget
/// violation (exit 3), `Parse` a usage/config problem (exit 2); everything
/// else is a failed precondition of the operation that raised it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of the operation (zero vector, p < 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A construction invariant failed (frequency collision, vanishing denominator).
    #[error("construction failed: {0}")]
    Construction(String),

    /// Desk-scale budget exceeded.
    #[error("resource budget exceeded: {what} (required {required}, limit {limit})")]
    Resource {
        what: String,
        required: u128,
        limit: u128,
    },

    /// Malformed configuration or fixture file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn resource(what: impl Into<String>, required: u128, limit: u128) -> Self {
        Error::Resource {
            what: what.into(),
            required,
            limit,
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
