use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("function undefined at {0}")]
    DomainError(String),

    #[error("multi-index has order zero")]
    EmptyIndex,

    #[error("path jet has no term for multi-index {0}")]
    MissingJetTerm(String),

    #[error("requested order {requested} exceeds available order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("adjacency matrix is not strictly upper triangular (entry ({row}, {col}) set)")]
    NotDag { row: usize, col: usize },

    #[error("matrix is not upper triangular")]
    NotTriangular,

    #[error("confluent divided difference needs derivative order {needed}, function provides {available}")]
    InsufficientDerivatives { needed: usize, available: usize },

    #[error("estimated work {estimate} exceeds cap {cap}")]
    ComplexityRefusal { estimate: u128, cap: u128 },

    #[error("input has a nontrivial imaginary part ({max_imag:.3e}); real input required")]
    NotReal { max_imag: f64 },

    #[error("eigenvalue {eigenvalue} lies within {gap_min:.1e} of the chemical potential {mu}")]
    TooCloseToMu { eigenvalue: f64, mu: f64, gap_min: f64 },

    #[error("ground state is degenerate (gap {gap:.3e})")]
    DegenerateGroundState { gap: f64 },

    #[error("non-finite entry produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
