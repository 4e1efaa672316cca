use thiserror::Error;

/// Failure modes of the numerical pipeline.
///
/// Every variant carries the measured quantity that tripped the check so
/// callers can report actionable diagnostics (most limits are cured by
/// raising `n_max`, `quad_nodes`, or the grid extent).
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Node doubling moved a quadrature result by more than the contract
    /// allows; the integrand is undersampled at the requested node count.
    #[error("{context}: node doubling changed the result by {delta:.3e} (allowed {tol:.3e}); increase quad_nodes")]
    QuadratureConvergence {
        context: &'static str,
        delta: f64,
        tol: f64,
    },

    /// The basis truncation dropped too much trace mass for the requested
    /// (epsilon, sigma); the state no longer fits in `n_max + 1` modes.
    #[error("trace deficit {deficit:.3e} exceeds {tol:.3e}; increase n_max for this (epsilon, sigma)")]
    Truncation { deficit: f64, tol: f64 },

    /// An operator that must be positive semidefinite produced an
    /// eigenvalue below the negativity tolerance, which signals an
    /// inconsistency between quadrature and truncation settings.
    #[error("eigenvalue {min_eigenvalue:.3e} below the negativity tolerance -{tol:.3e}")]
    Negativity { min_eigenvalue: f64, tol: f64 },

    /// Halving the finite-difference step moved the derivative more than
    /// the contract allows; the step is too large (or too small) here.
    #[error("finite-difference step unstable: halving moved an entry by {delta:.3e} (allowed {tol:.3e})")]
    StepInstability { delta: f64, tol: f64 },

    /// The time grid truncates a non-negligible exponential tail.
    #[error("time grid too short: tail mass {mass:.3e} exceeds {tol:.3e}; increase t_max")]
    TailMass { mass: f64, tol: f64 },

    /// An internal invariant failed (e.g. the imaginary residue of a
    /// manifestly real integral); indicates a bug, not bad user input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
