//! Quantitative machinery for stable 2-systole bounds under positive scalar
//! curvature.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact`]: rational scalars, small exact matrices, `p/q` serialization.
//! * [`bivector`]: canonical form, mass and comass of 2-vectors / 2-forms.
//! * [`normed_lattice`]: norms with certified Euclidean sandwich constants,
//!   successive minima, dual lattices and the transference product.
//! * [`nonzero_combination`]: bounded-cost integer combinations with all
//!   coordinates nonzero, plus an exhaustive oracle.
//! * [`charclass`]: truncated power series, Â-class of complex projective
//!   space, Chern characters of line bundles, admissibility.
//! * [`flat_model`]: stable 2-systoles of flat tori and products with round
//!   spheres.
//! * [`bounds_pipeline`]: the curvature-to-systole bound chain with exact
//!   `q·π^s` results and replayable derivation traces.

pub mod bivector;
pub mod bounds_pipeline;
pub mod charclass;
pub mod error;
pub mod exact;
pub mod flat_model;
pub mod nonzero_combination;
pub mod normed_lattice;

pub use error::{Error, ErrorKind, Result};
