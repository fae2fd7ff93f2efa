//! Radial discretization of R^N: graded grid, quadrature, norms,
//! derivatives, and the dilation and rescaling maps.

mod field;
mod grid;
pub mod interp;
pub mod io;

pub use field::{Norm, RadialField};
pub use grid::RadialGrid;
