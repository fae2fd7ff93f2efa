use crate::error::{Error, Result};
use crate::functionals::Formulation;
use crate::profiles::LimitKind;
use crate::radial::RadialField;
use crate::scalar::Scalar;
use crate::solver::GroundState;

/// Norm in which two profiles are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DistanceMode {
    /// ‖f − g‖₂/‖g‖₂.
    L2Relative,
    /// ‖f − g‖_{H¹}/‖g‖_{H¹}.
    H1Relative,
}

/// Relative distance from `field` to `reference`. The reference is
/// interpolated onto the field's grid (zero beyond its own radius).
pub fn profile_distance<T: Scalar>(field: &RadialField<T>, reference: &RadialField<T>, mode: DistanceMode) -> Result<T> {
    if field.grid().dim() != reference.grid().dim() {
        return Err(Error::GridMismatch(format!(
            "N = {} against a reference for N = {}",
            field.grid().dim(),
            reference.grid().dim()
        )));
    }
    let r = reference.resample(std::sync::Arc::clone(field.grid()))?;
    let diff = field.with_values(field.values().iter().zip(r.values()).map(|(&a, &b)| a - b).collect())?;
    let (num, den) = match mode {
        DistanceMode::L2Relative => (diff.l2_squared(), r.l2_squared()),
        DistanceMode::H1Relative => (diff.l2_squared() + diff.grad_squared(), r.l2_squared() + r.grad_squared()),
    };
    if !(den > T::zero()) {
        return Err(Error::GridMismatch("reference vanishes on the field's grid".into()));
    }
    Ok((num / den).sqrt())
}

/// The rescaling of a frequency ground state that converges to the limit
/// state of `kind`: w(x) = ε^{−s}u(ε^{−1/2}x) with s = 1/(q−2) for the
/// local limit and s = (2+α)/(4(p−1)) for the Choquard limit.
pub fn rescale_to_limit<T: Scalar>(state: &GroundState<T>, kind: LimitKind) -> Result<RadialField<T>> {
    let params = state
        .params
        .as_ref()
        .ok_or_else(|| Error::Regime("state carries no problem parameters".into()))?;
    let Formulation::Frequency(eps) = params.formulation else {
        return Err(Error::Regime("limit rescaling is defined for frequency problems".into()));
    };
    let s = match kind {
        LimitKind::Power => T::one() / (params.q - T::of(2.0)),
        LimitKind::Choquard => (T::of(2.0) + params.alpha) / (T::of(4.0) * (params.p - T::one())),
    };
    state.field.power_rescale(eps.powf(-s), eps.powf(T::of(-0.5)))
}
