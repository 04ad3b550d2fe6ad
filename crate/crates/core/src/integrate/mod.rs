//! Time integration of the truncated system.
//!
//! Three schemes are available (see [`Scheme`]). The linear part `-L` has
//! rates growing like `2^{2 alpha k}` while the transport term contributes
//! rates of order `b_k`, so the default for `alpha > 0` is the
//! integrating-factor scheme, which treats `-L` exactly.

mod controls;
mod escape;
mod linear;
mod stepper;
mod trajectory;

pub use controls::{Scheme, StepControls};
pub use escape::detect_escape;
pub use linear::{linear_semigroup, LinearFlow};
pub use stepper::{step, Integrator, StepOutput};
pub use trajectory::{integrate, Diagnostics, Sample, Termination, Trajectory};
