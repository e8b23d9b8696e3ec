//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by kernel evaluation, fitting, inference and the
/// experiment harness.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// The singular kernel family has a pole at the origin; point
    /// evaluation there has no finite value.
    #[error("singular kernel pole: point evaluation at the origin is undefined")]
    KernelPole,

    #[error("quadrature did not converge: requested {requested:.3e}, achieved {achieved:.3e}")]
    QuadratureNonConvergence { requested: f64, achieved: f64 },

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    /// The least-squares design for the supplied jump locations is rank
    /// deficient (e.g. two locations closer than the design resolution).
    #[error("degenerate fit: rank-deficient design for the supplied jump locations")]
    DegenerateFit,

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("contract violation: {0}")]
    Contract(String),

    /// Confidence intervals require the normal limit law, which is not
    /// available for the singular kernel family.
    #[error("inference is not available for the singular (abel) kernel family: \
             only the convergence rate is known, not a limit law")]
    InferenceUnavailable,

    #[error("information matrix is numerically singular (min eigenvalue {0:.3e})")]
    SingularInformation(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
