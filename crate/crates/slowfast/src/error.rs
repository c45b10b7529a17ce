//! Error taxonomy shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An analytic formula degenerated (zero denominator, negative
    /// discriminant, infeasible threshold) for the given parameters.
    #[error("degenerate analysis: {0}")]
    AnalysisDegenerate(String),

    /// Two independent routes to the same quantity disagreed beyond
    /// tolerance. Always a bug, never a user error.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    /// Slow-manifold expansion evaluated too close to a point where the
    /// correction terms blow up.
    #[error("slow-manifold expansion is singular near u = {u}: {reason}")]
    SingularExpansion { u: f64, reason: String },

    /// The entry-exit relation has no root because the entry level never
    /// reaches past the transcritical point.
    #[error("no exit point: {0}")]
    NoExit(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Adaptive step size collapsed below the hard floor.
    #[error(
        "stiffness failure: step size underflow (h = {h:.3e} at t = {t:.6}); \
         reduce the tolerance or the integration horizon"
    )]
    StiffnessFailure { t: f64, h: f64 },

    #[error("canard explosion not detected: {0}")]
    ExplosionNotDetected(String),

    /// Predator invasion is impossible: the minimum wave speed is not real.
    #[error("invasion infeasible: delta*(1+alpha) = {product} >= 1")]
    InvasionInfeasible { product: f64 },

    #[error("CFL violation: dt = {dt} exceeds the stable limit {limit:.6e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("field blow-up: non-finite value appeared at step {step} (t = {t:.6})")]
    BlowUp { step: usize, t: f64 },

    #[error("front not found: {0}")]
    FrontNotFound(String),
}
