//! Time integration of the surface/interior transport system.
//!
//! The surface buoyancy and the interior potential vorticity are both
//! advected by the horizontal velocity of the streamfunction `Psi`, which is
//! recovered from them by the elliptic split at every stage. Critical
//! dissipation `-eps Lambda theta` is integrated exactly per mode.

mod forcing;
mod params;
mod run;
mod state;
mod step;
mod velocity;

pub use forcing::ForcingSpec;
pub use params::StepParams;
pub use run::{run, RunSetup, Trajectory, AUTO_DT_SAFETY};
pub use state::SimState;
pub use step::{cfl_dt, rhs, solve_forcing_potential, step_rk4};
pub use velocity::{perp, velocity_from_state, Velocity};
