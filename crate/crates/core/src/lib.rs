//! Network games with endogenous link formation: Nash solvers on fixed
//! graphs, pairwise-stability checkers and exhaustive enumeration,
//! structural classifiers for the stable-graph taxonomy, and the
//! adjustment dynamics that select among stable outcomes.
//!
//! Everything numeric is generic over [`Scalar`]: instantiate with [`Real`]
//! for fast tolerance-based runs or [`Rational`] for exact arithmetic.

#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

pub mod analytics;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod games;
pub mod graph;
pub mod model;
pub mod sampling;
pub mod scalar;
pub mod stability;
pub mod structure;

pub use error::{Error, Result};
pub use graph::{Graph, PlayerSet, MAX_ENUMERATION_PLAYERS, MAX_PLAYERS};
pub use model::{ActionDomain, ActionProfile, GameSpec, Outcome};
pub use scalar::{Ratio64, Scalar};

/// Floating-point scalar for tolerance-mode runs.
pub type Real = f64;

/// Arbitrary-precision rational scalar for exact-mode runs.
pub type Rational = num_rational::BigRational;
