use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("marked set is empty")]
    EmptyMarkedSet,

    #[error("duplicate marked index {0}")]
    DuplicateMarked(usize),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("source is not coupled to the marked set through the unitary (u = 0)")]
    ZeroCoupling,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no tabulated preset for j={j}, source={source_index}, family={family}")]
    UnknownPreset {
        j: u8,
        source_index: usize,
        family: &'static str,
    },

    #[error("no phase reference for spin {0}")]
    MissingReference(u8),

    #[error("sequence contains a gradient and has no unitary propagator")]
    NonUnitarySequence,
}
