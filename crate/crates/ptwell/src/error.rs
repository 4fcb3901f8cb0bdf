use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A denominator or decay exponent vanished (e.g. alpha = 0 at v_I = 0, k^2 = v0).
    #[error("singular parameter combination: {0}")]
    Singular(String),

    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    /// Continuation corrector failed after the allowed step halvings.
    #[error("continuation stalled: {0}")]
    ContinuationStall(String),

    /// The two branches handed to the exceptional-point solver do not approach.
    #[error("branches do not form a merging pair: {0}")]
    NotAPair(String),

    #[error("adaptive quadrature exceeded maximum recursion depth on [{a}, {b}]")]
    MaxDepthExceeded { a: f64, b: f64 },

    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),

    #[error("no bound state: {0}")]
    NoBoundState(String),

    /// Two supposedly equivalent computation routes disagreed beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
