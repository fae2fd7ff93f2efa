//! Positive radial ground states by Nehari-projected preconditioned descent,
//! and a shooting oracle for the local equation.

mod config;
mod persist;
mod shooting;
mod solve;
mod tridiag;

pub use config::{GridSpec, InitialGuess, SolverConfig};
pub use persist::{read_params, write_run};
pub use shooting::{shooting_oracle, shooting_profile, ShootingProfile};
pub use solve::{
    continue_branch, internal_form, solve, solve_cached, solve_model, GroundState, Model, OperatorCache, Scaling,
};
