use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (‖U†U − I‖_F = {0:.3e})")]
    NotUnitary(f64),

    #[error("trace deviates from 1 by {0:.3e}")]
    BadTrace(f64),

    #[error("state is not normalized (‖ψ‖² = {0})")]
    NotNormalized(f64),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),
}
