use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max |A - A†| = {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("eigensolver failed to converge (reconstruction residual {residual:.3e})")]
    EigenNonConvergence { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dephasing function vanishes at t = {t} (|k| = {modulus:.3e}); time-local rates are singular")]
    SingularPoint { t: f64, modulus: f64 },

    #[error("invariant violated at grid point (i = {i}, j = {j}; t = {t}, t' = {tprime}): {detail}")]
    PointInvariant {
        i: usize,
        j: usize,
        t: f64,
        tprime: f64,
        detail: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
