use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Model or simulation parameters violate a precondition.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// A bilateral/unilateral series did not reach the requested tolerance.
    #[error("series did not converge within {max_terms} terms per side (frontier bound {bound:.3e})")]
    NonConvergence { max_terms: usize, bound: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// Two routes to the same quantity disagree beyond tolerance.
    #[error("internal consistency violation: {0}")]
    Disagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
