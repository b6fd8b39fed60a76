//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
///
/// Numerical tolerances quoted in the variants are the thresholds the
/// validating constructors enforce; values within tolerance are accepted
/// and, where it matters, cleaned up (symmetrized, renormalized) rather
/// than rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// State vector or matrix dimension outside the supported set {2, 4, 8}.
    #[error("unsupported dimension {0}; expected 2, 4, or 8")]
    UnsupportedDimension(usize),

    /// Two operands have incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch {
        /// Dimension of the first operand.
        left: usize,
        /// Dimension of the second operand.
        right: usize,
    },

    /// Attempted to normalize a (near-)zero vector.
    #[error("cannot normalize a zero vector (norm = {0:.3e})")]
    ZeroNorm(f64),

    /// Matrix deviates from Hermiticity beyond tolerance.
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    /// Matrix trace deviates from one beyond tolerance.
    #[error("matrix trace deviates from one by {0:.3e}")]
    NotUnitTrace(f64),

    /// Matrix has a negative eigenvalue beyond tolerance.
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositive(f64),

    /// A set of vectors fails pairwise orthonormality.
    #[error("vectors are not orthonormal (max deviation {0:.3e})")]
    NotOrthonormal(f64),

    /// Probabilities are negative or fail to normalize.
    #[error("invalid probability data: {0}")]
    InvalidProbability(String),

    /// Scalar parameter outside its admissible interval.
    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        /// Parameter name as it appears in the public API.
        name: &'static str,
        /// Offending value.
        value: f64,
        /// Lower end of the admissible interval.
        min: f64,
        /// Upper end of the admissible interval.
        max: f64,
    },

    /// Probe states violate the attack constraints beyond tolerance.
    #[error("attack constraints violated (max residual {0:.3e})")]
    ConstraintViolation(f64),

    /// Root search failed: the two curves neither cross nor touch on the interval.
    #[error("no crossing found on [{lo}, {hi}]")]
    NoCrossing {
        /// Left end of the searched interval.
        lo: f64,
        /// Right end of the searched interval.
        hi: f64,
    },

    /// Invalid session or optimizer configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Iterative search exhausted its restart budget without meeting
    /// its tolerance.
    #[error("optimization did not converge: {0}")]
    NonConvergence(String),

    /// Too few samples to produce the requested estimate.
    #[error("insufficient data: need at least {needed} records, got {got}")]
    InsufficientData {
        /// Minimum number of records the estimator requires.
        needed: usize,
        /// Number of records actually supplied.
        got: usize,
    },
}
