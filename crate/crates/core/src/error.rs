use thiserror::Error;

use crate::jacobian::HallWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("zero/negative count at `{path}` (got {value})")]
    InvalidCount { path: String, value: i64 },

    #[error("invalid configuration: {0}")]
    Structure(String),

    #[error("instance too large for {what}: {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "scalar Hall check (ok = {matching_ok}) disagrees with the structured proper family (ok = {structured_ok})"
    )]
    ProperDisagreement {
        matching_ok: bool,
        structured_ok: bool,
    },

    #[error("separability fails at cell {cell}{}", user.map(|k| format!(", user {k}")).unwrap_or_default())]
    Separability { cell: usize, user: Option<usize> },

    #[error("system is not proper: {} equations see only {} variables", witness.equations.len(), witness.neighbor_count)]
    NotProper { witness: Box<HallWitness> },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}
