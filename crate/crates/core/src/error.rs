use thiserror::Error;

/// Failure modes of the escape-rate pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested saddle profile does not exist for these parameters.
    #[error("validity error: {0}")]
    Validity(String),
    /// Evaluation at (or too close to) the critical length, where the
    /// fluctuation operator has a zero mode.
    #[error("singularity error: {0}")]
    Singularity(String),
    /// An iterative scheme failed to reach its accuracy target.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// Non-finite values appeared during integration.
    #[error("numerical overflow: {0}")]
    Overflow(String),
    /// Explicit time stepping left the stability region.
    #[error("instability error: {0}")]
    Instability(String),
    /// Too few usable Monte Carlo samples to form an estimate.
    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),
}

pub type Result<T> = std::result::Result<T, Error>;
