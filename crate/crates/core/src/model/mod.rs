//! State and parameter types, the discrete fractional dissipation operator,
//! the right-hand sides of the inviscid and dissipative systems, and the
//! `X^s` norm family.

mod constants;
mod norms;
mod operator;
mod params;
mod rhs;
mod state;

pub use constants::{
    c0_candidate, coercivity_constant, cs_constant, default_goodbad_c, Constants,
};
pub use norms::{slopes, sup_abs, weighted_slopes, xs_norm};
pub use operator::{
    dissipation, dissipation_direct, dissipation_increments, dissipation_limit, telescoped_sum,
    Dissipation,
};
pub use params::{ModelParams, Tail};
pub use rhs::{rhs, rhs_full, rhs_inviscid, Rhs};
pub use state::{DyadicState, SlopeVector, WeightedSlopeVector};
