//! Radial numerical laboratory for the Choquard equation with combined
//! attractive nonlinearities,
//!
//! ```text
//! −Δu + εu = (I_α ∗ |u|^p)|u|^{p−2}u + |u|^{q−2}u   in R^N.
//! ```
//!
//! The crate computes positive radial ground states, certifies them with the
//! Nehari and Pohozaev identities, and measures their asymptotic scaling laws
//! in the frequency ε. Every numerical type is generic over [`Scalar`]
//! (`f32` or `f64`); the aliases at the crate root fix `f64`.

pub mod asymptotics;
pub mod error;
pub mod functionals;
pub mod profiles;
pub mod radial;
pub mod riesz;
pub mod scalar;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision radial grid.
pub type Grid = radial::RadialGrid<f64>;
/// Double-precision radial field.
pub type Field = radial::RadialField<f64>;
/// Double-precision Riesz operator.
pub type Riesz = riesz::RieszOperator<f64>;
