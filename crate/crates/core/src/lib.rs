//! Opinion dynamics on signed multigraphs.
//!
//! Agents hold opinions in a spectrum (an interval, the real line, or an
//! ordered finite label set) and repeatedly average (or majority-vote) the
//! opinions of their neighbors, inverting first the opinions of neighbors
//! they oppose. The crate simulates these dynamics, classifies networks
//! graph-theoretically (balanced / anti-balanced / neither) to predict the
//! long-run regime (polarization, divergence, neutral consensus), verifies
//! the predictions spectrally, and constructs equilibria.
//!
//! Modules follow the pipeline:
//!
//! * [`spectrum`] — opinion spectra and deviation (opposition) functions
//! * [`graph`] — the signed multigraph: weights, relations, structural predicates
//! * [`dynamics`] — the updating processes, trajectories, limit detection
//! * [`analysis`] — SCC structure, (reverse-)opposition bipartiteness, period, classification
//! * [`spectral`] — affine representation, Jacobi eigensolver, gauge transform, influence
//! * [`equilibria`] — fixed points, consensus characterization, constructed equilibria, wisdom
//! * [`verify`] — randomized agreement harness (classification vs. simulation vs. spectra)
//! * [`scenario`] — the canonical scenario JSON format and bundled presets

pub mod analysis;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod graph;
pub mod scenario;
pub mod spectral;
pub mod spectrum;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// An edge exists iff its weight exceeds this threshold; scenario files may
/// carry rounding noise.
pub const EDGE_EPS: f64 = 1e-12;
