use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "matrix is not symmetric: max asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}"
    )]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("step size {h:e} violates RK4 stability bound: h*sqrt(rho^2 + a^2) = {product:.4} > {limit}")]
    UnstableStep { h: f64, product: f64, limit: f64 },

    #[error(
        "integration to T = {horizon:e} needs {needed} steps, more than max_steps = {max_steps}"
    )]
    MaxStepsExceeded {
        needed: u64,
        max_steps: u64,
        horizon: f64,
    },

    #[error("right-hand side is not in the range of A (null-space component {range_residual:e})")]
    RangeViolation { range_residual: f64 },

    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("schedule produced invalid parameters a = {a:e}, t = {t:e}")]
    InvalidSchedule { a: f64, t: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
