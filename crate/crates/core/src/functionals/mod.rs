//! The generalized four-coefficient functional, its first variation and the
//! Nehari, Pohozaev and dilation structure.

mod coefficients;
mod params;
mod terms;

pub use coefficients::FunctionalCoefficients;
pub use params::{Formulation, ProblemParams, CRITICAL_TOL};
pub use terms::{
    action, dilation_max, dilation_path, el_residual, nehari_dilation_min, nehari_project, nehari_scale, pohozaev, pohozaev_relative, tau,
    Diagnostics, Evaluation, Quotient, Terms,
};
