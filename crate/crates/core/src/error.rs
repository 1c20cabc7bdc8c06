use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report. Variants name the violated
/// invariant and, where there is one, its magnitude.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace} (expected 1)")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid odds: {0}")]
    InvalidOdds(String),

    #[error("invalid bet allocation: {0}")]
    InvalidAllocation(String),

    #[error("odds regime is {found}, operation requires {expected}")]
    WrongRegime {
        expected: &'static str,
        found: &'static str,
    },

    #[error("odds are not uniform")]
    NonUniformOdds,

    #[error("measurement is not complete: max deviation from identity {deviation:.3e}")]
    CompletenessViolated { deviation: f64 },

    #[error("operators are not orthogonal projectors: max deviation {deviation:.3e}")]
    NotProjective { deviation: f64 },

    #[error("optimizer failed: {0}")]
    OptimizerFailed(String),

    #[error("input {input} has zero prior probability but nonzero transition support")]
    ZeroPriorWithSupport { input: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
