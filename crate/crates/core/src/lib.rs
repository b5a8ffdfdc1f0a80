//! Densities of sign changes and gaps in power-series coefficients, the
//! slope-constrained envelopes used to define them, and numerical probes
//! that locate singularities on the circle of convergence.
//!
//! The crate is organised bottom-up:
//!
//! * [`seqcore`]: coefficient sequences, sign changes, window families and
//!   the deterministic test-family generators.
//! * [`envelope`]: increasing piecewise-linear functions and their lower and
//!   upper slope regularizations.
//! * [`density`]: the densities `D1`..`D4`, the divergence classifier for
//!   `∫ (n − n_Δ)/r² dr`, Helly-style limit extraction and the density report.
//! * [`analysis`]: zero-count bounds, the bounded-multiplicity interval cover
//!   and the contour interpolant of the coefficient sequence.
//! * [`probe`]: Padé poles, ray growth and arc consistency checks.
//! * [`cli`]: the subcommands behind the `fabry` binary.

pub mod analysis;
pub mod cli;
pub mod density;
pub mod envelope;
mod error;
pub mod probe;
pub mod scalar;
pub mod seqcore;

pub use error::{Error, Result};
pub use scalar::Scalar;
