use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cannot trace out all subsystems")]
    EmptyKeepSet,

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    NotUnitTrace(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NegativeEigenvalue(f64),

    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("process matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    ChiNotPositive(f64),

    #[error("normalization undefined for unequal dimensions {0:?}")]
    UnequalPartyDims(Vec<usize>),

    #[error("invalid party structure: {0}")]
    InvalidParties(String),

    #[error("observable has zero operator norm")]
    ZeroNormObservable,

    #[error("missing measurement setting for observable {0}")]
    MissingSetting(String),

    #[error("insufficient tomographic settings; missing: {0}")]
    InsufficientSettings(String),

    #[error("invalid label {0:?}")]
    InvalidLabel(String),

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
