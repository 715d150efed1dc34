use thiserror::Error;

/// Errors raised by map evaluation, series construction, root finding and
/// continuation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("iteration diverged to a non-finite value")]
    Divergence,
    #[error("map is not invertible for delta = 0")]
    NonInvertible,
    #[error("origin is not a real saddle (c^2 - 4 delta = {discriminant})")]
    NonSaddle { discriminant: f64 },
    #[error("origin is not hyperbolic with a real 2+2 splitting: {0}")]
    NonHyperbolic(String),
    #[error("resonant coefficient system at order {order:?} (|det| = {det:e})")]
    Resonance { order: (usize, usize), det: f64 },
    #[error("symmetry lemma requires delta = 1 and an unstable branch")]
    SymmetryNotApplicable,
    #[error("Newton iteration did not converge after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("Newton iteration converged to the trivial root at the origin")]
    TrivialRoot,
    #[error("root parameter radius {radius} exceeds the trusted series domain {trusted}")]
    OutsideValidity { radius: f64, trusted: f64 },
    #[error("no homoclinic root found: {0}")]
    NoRoot(String),
    #[error("continuation cannot begin: {0}")]
    CannotBegin(String),
    #[error("square-root law fit invalid: {0}")]
    FitInvalid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
