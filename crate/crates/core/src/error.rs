//! Error vocabulary shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Precondition violated by the caller (dimension mismatch, bad parameter).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The LP engine could not certify optimality or feasibility for numeric
    /// reasons (singular basis, iteration blow-up). Distinct from infeasible.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// The sign-constraint system admits no solution: corrupted bits or a
    /// threshold vector inconsistent with the measurements.
    #[error("measurements admit no sign-consistent solution")]
    InfeasibleMeasurements,

    /// Brute-force l0 search exhausted every support up to `kmax`.
    #[error("no sign-consistent support of size <= {kmax}")]
    InfeasibleAtSparsity { kmax: usize },

    /// A combinatorial guard refused the requested enumeration.
    #[error("problem too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
