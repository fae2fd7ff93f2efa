//! Explicit limit profiles, the dilations ρ₀ that select among them, and the
//! best constants fixing the limiting energies.

mod bubble;
mod constants;

pub use bubble::{
    bubble, profile_residual, profile_terms, resolve_u_amplitude, resolve_v_coefficient, AmplitudeFit, ProfileKind, ProfileSpec,
};
pub use constants::{
    best_constant, limit_ground_state, limit_norms, quotient, rho0, ConstantKind, LimitKind, LimitNorms, ProfileLab,
    Rho0Kind,
};
