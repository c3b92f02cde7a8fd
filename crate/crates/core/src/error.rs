use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) lies outside a {n_rows}x{n_cols} pattern")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("dimension mismatch: {what} (A is {a_rows}x{a_cols}, B is {b_rows}x{b_cols})")]
    DimensionMismatch {
        what: &'static str,
        a_rows: usize,
        a_cols: usize,
        b_rows: usize,
        b_cols: usize,
    },

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("walk enumeration exceeded {limit} monomials")]
    PathOverflow { limit: usize },

    #[error("exact driver search has {candidates} candidate components, above the cap of {cap}")]
    InstanceTooLarge { candidates: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Io(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
