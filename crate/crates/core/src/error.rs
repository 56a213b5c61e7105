use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("guard exceeded: {what} needs {needed}, limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("vertex set is not full-dimensional (affine dimension {affine_dim} in R^{dim})")]
    NotFullDimensional { affine_dim: i64, dim: usize },

    #[error("inequality is not valid on the vertex set")]
    InvalidInequality,

    #[error("system is unbounded")]
    Unbounded,

    #[error("non-0/1 vertex found: ({})", .0.join(", "))]
    NonBinaryVertex(Vec<String>),

    #[error("computation exceeded its deadline")]
    DeadlineExceeded,

    #[error("value {value} outside [0, 1] for subset {subset}")]
    OutOfUnitInterval { subset: String, value: String },

    #[error("atom weights sum to {0}, expected 1")]
    AtomsNotNormalized(String),

    #[error("negative atom weight {value} at {atom}")]
    NegativeAtom { atom: String, value: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("integer coefficient overflow")]
    Overflow,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
