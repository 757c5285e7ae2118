use thiserror::Error;

/// Errors produced by the solver suite.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parameter outside its domain: {0}")]
    Domain(String),

    #[error("conjugate-symmetry violation: relative imaginary residue {residue:.3e} exceeds {tol:.3e}")]
    SymmetryViolation { residue: f64, tol: f64 },

    #[error("iteration failed to converge at step {step}: {context} (outer {outer}, inner {inner})")]
    Nonconvergence {
        step: usize,
        context: String,
        outer: usize,
        inner: usize,
    },

    #[error("solution diverged at step {step}: {context}")]
    Divergence { step: usize, context: String },

    #[error("Newton iteration stagnated: {0}")]
    Stagnation(String),

    #[error("singular factorization: {0}")]
    SingularMatrix(String),

    #[error("peak not found: {0}")]
    PeakNotFound(String),

    #[error("continuation failed at gamma = {gamma}: {source}")]
    ContinuationLeg {
        gamma: f64,
        #[source]
        source: Box<SolverError>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SolverError>;
