//! Error type shared by every module in the crate.

use std::fmt;

/// Errors reported by space construction, parsing, orthogonality helpers,
/// and the estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input text was not valid JSON. The message includes the position
    /// reported by the parser.
    Parse(String),
    /// A document or argument violated a documented validation rule.
    Validation(String),
    /// Vector or functional length does not match the space dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A coordinate or parameter was NaN or infinite where a finite value
    /// is required.
    NonFinite(String),
    /// An input that must be nonzero or nondegenerate was not.
    Degenerate(String),
    /// An objective produced no finite value at any admissible point, so
    /// no estimate can be reported.
    DegenerateObjective(String),
    /// A caller broke a precondition documented on the function.
    Contract(String),
    /// The requested quantity is not defined for this query (for example
    /// a closed-form reference value that the catalog does not carry).
    NotAvailable(String),
    /// The identity id is not in the verifier catalog.
    UnknownIdentity(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFinite(msg) => write!(f, "non-finite input: {msg}"),
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
            Error::DegenerateObjective(msg) => {
                write!(f, "degenerate objective: {msg}")
            }
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
            Error::NotAvailable(msg) => write!(f, "not available: {msg}"),
            Error::UnknownIdentity(id) => write!(f, "unknown identity id: {id}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
