//! Dyadic model of one-dimensional nonlocal transport with fractional
//! dissipation.
//!
//! The crate integrates the truncated system
//!
//! ```text
//! a_k' = -(a_k - a_{k-1})^2 2^k - (L^alpha a)_k,      a_0' = -(L^alpha a)_0
//! ```
//!
//! (and its inviscid counterpart with `a_0 = 0`), evaluates the discrete
//! dissipation operator, and checks the preservation properties, a-priori
//! bounds and blow-up/regularity behaviour of its solutions.
//!
//! * [`model`]: parameters, states, the operator `L^alpha`, right-hand sides, norms.
//! * [`integrate`]: time stepping, the linear semigroup, trajectories, escape detection.
//! * [`analysis`]: invariant checks and blow-up diagnostics.
//! * [`scenarios`]: initial-data generators.
//! * [`io`]: run configuration and output files.
//! * [`runner`]: a configured run end to end.
//! * [`sweep`]: parallel `(alpha, K)` scans.

// `!(x > y)` is used deliberately so that NaN lands on the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod integrate;
pub mod io;
pub mod model;
pub mod runner;
pub mod scenarios;
pub mod sum;
pub mod sweep;

pub use error::{DyadicError, Result};
pub use model::{DyadicState, ModelParams, SlopeVector, Tail, WeightedSlopeVector};
