//! Error type shared by all modules of the crate.

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument was outside its mathematical domain (negative SIR,
    /// nonpositive rate, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// A success-probability target of 1 or more was requested; no finite
    /// SIR reaches it.
    #[error("success probability target {eta} requires an infinite SIR")]
    InfeasibleTarget { eta: f64 },

    /// The supplied curve does not behave like a sigmoid packet-success
    /// function (no bracketable root of f(g) = g f'(g)).
    #[error("invalid efficiency function: {0}")]
    InvalidEfficiency(String),

    /// Offered load meets or exceeds the service capacity; the queue has no
    /// stationary regime.
    #[error("unstable queue: success probability {success_prob} <= offered load {load}")]
    UnstableQueue { success_prob: f64, load: f64 },

    /// Utility (goodput per watt) is undefined at zero transmit power.
    #[error("utility undefined for zero transmit power")]
    UndefinedUtility,

    /// A per-user index did not refer to a user.
    #[error("user index {index} out of range for {len} users")]
    IndexOutOfRange { index: usize, len: usize },

    /// The selected users demand more than the whole network: their total
    /// size reaches 1.
    #[error("infeasible selection: total size {total_size} >= 1")]
    InfeasibleSet { total_size: f64 },

    /// Exhaustive subset search was asked for a pool too large to enumerate.
    #[error("pool of {size} candidates exceeds the exhaustive-search limit {max}; use the class-based solvers")]
    PoolTooLarge { size: usize, max: usize },

    /// An iterative solver did not meet its convergence criterion.
    #[error("solver failed to converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
