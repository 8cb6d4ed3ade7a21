use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("classes live on different Neron-Severi lattices")]
    LatticeMismatch,

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid surface model: {0}")]
    InvalidModel(String),

    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
