use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure did not reach the requested accuracy.
    #[error("accuracy error: {what} (achieved {achieved:e}, requested {requested:e})")]
    Accuracy {
        what: String,
        achieved: f64,
        requested: f64,
    },

    /// A linear-algebra or recursion step broke down numerically.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Two or more candidate models explain the data about equally well.
    #[error("ambiguous singularity fit: r={best_r} (residual {best_residual:e}) vs r={runner_up_r} (residual {runner_up_residual:e})")]
    Ambiguous {
        best_r: f64,
        best_residual: f64,
        runner_up_r: f64,
        runner_up_residual: f64,
    },

    /// A structural invariant (sign lemma, positivity, ...) does not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A queueing model is not positive recurrent.
    #[error("unstable model: mean arrivals per slot {mean_a} >= 1")]
    Unstable { mean_a: f64 },

    /// A denominator vanished away from a removable point.
    #[error("singularity encountered: {0}")]
    Singularity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
