//! Crate error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An opinion lies outside the spectrum it is evaluated on.
    #[error("opinion {value} is outside the spectrum {spectrum}")]
    OutOfSpectrum { value: String, spectrum: String },

    /// The identity function was used where a deviation function is required.
    #[error("identity is not a deviation function and cannot be evaluated in a deviate role")]
    IdentityAsDeviation,

    /// A deviation kind is not defined on the given spectrum.
    #[error("deviation kind `{kind}` is not usable here: {detail}")]
    SpectrumMismatch { kind: &'static str, detail: String },

    /// An operation for the continuous rule was called on a discrete graph or
    /// vice versa.
    #[error("update-rule mismatch: {0}")]
    WrongRule(String),

    /// The graph has no affine-linear representation.
    #[error("no affine representation: {0}")]
    RepresentationUnavailable(String),

    /// A symmetric-only numeric kernel received an asymmetric matrix.
    #[error("matrix is not symmetric: max |A_ij - A_ji| = {found:e} exceeds {tol:e}")]
    NotSymmetric { found: f64, tol: f64 },

    /// An influence-report precondition is violated; `condition` names it.
    #[error("influence precondition violated: {condition}")]
    Regime { condition: String },

    /// Consensus characterization is unavailable (per-pair heterogeneous
    /// deviation functions).
    #[error("characterization unavailable: {0}")]
    Unavailable(String),

    /// Exhaustive enumeration would exceed the configured state bound.
    #[error("state space has {states} vectors, exceeding the bound {bound}")]
    SizeBound { states: u128, bound: u128 },

    /// Malformed caller input (partitions, index sets, flags).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A scenario document failed to parse or validate.
    #[error("scenario error: {0}")]
    Scenario(String),
}
