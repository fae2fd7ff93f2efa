//! Riesz potential `I_α∗f` for radial `f`, the Choquard energy `D_p`, and the
//! sharp Hardy–Littlewood–Sobolev constant.

pub mod kernel;
mod operator;

pub use kernel::KernelMethod;
pub use operator::{hls_sharp_constant, riesz_constant, RieszOperator};
pub(crate) use operator::abs_pow;
