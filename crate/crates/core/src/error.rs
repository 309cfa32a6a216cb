use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    #[error("grid must contain at least one point")]
    EmptyGrid,

    #[error("matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    #[error("matrix is not positive semidefinite: eigenvalue {value:e} below -{floor:e}")]
    NotPositiveSemidefinite { value: f64, floor: f64 },

    #[error("eigendecomposition failed to converge")]
    EigenSolver,

    #[error("received power is zero; SNR control is undefined")]
    ZeroTrace,

    #[error("slope fit needs at least 3 usable points, got {0}")]
    InsufficientFitPoints(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
