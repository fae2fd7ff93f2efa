use std::sync::Arc;
use std::time::Instant;

use ode_solvers::continuous_output_model::ContinuousOutputModel;
use ode_solvers::{Dopri5, System, Vector2};

use crate::error::{invalid, Error, Result};
use crate::functionals::FunctionalCoefficients;
use crate::radial::{RadialField, RadialGrid};
use crate::solver::solve::{certify, GroundState, Model, Scaling};

/// Start of integration; the series u(0) + f(u(0)) r²/(2N) is used below it.
const R_START: f64 = 1e-4;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Shot {
    /// u crossed zero: u(0) too large.
    Crossed,
    /// u′ turned positive while u > 0: u(0) too small.
    Turned,
    /// neither before the end of the interval.
    Undecided,
}

struct Radial {
    n: f64,
    q: f64,
    eps: f64,
    outcome: Shot,
}

impl System<f64, Vector2<f64>> for Radial {
    fn system(&self, r: f64, y: &Vector2<f64>, dy: &mut Vector2<f64>) {
        let u = y[0];
        dy[0] = y[1];
        dy[1] = self.eps * u - u.abs().powf(self.q - 2.0) * u - (self.n - 1.0) / r * y[1];
    }

    fn solout(&mut self, _r: f64, y: &Vector2<f64>, _dy: &Vector2<f64>) -> bool {
        if y[0] < 0.0 {
            self.outcome = Shot::Crossed;
        } else if y[1] > 0.0 {
            self.outcome = Shot::Turned;
        }
        self.outcome != Shot::Undecided
    }
}

/// One shot from u(0) = `u0`: its classification, dense output and stop radius.
fn shoot(n: usize, q: f64, eps: f64, u0: f64, r_end: f64, rtol: f64) -> Result<(Shot, ContinuousOutputModel<f64, Vector2<f64>>, f64)> {
    let nf = n as f64;
    let f0 = eps * u0 - u0.powf(q - 1.0);
    let y0 = Vector2::new(u0 + f0 * R_START * R_START / (2.0 * nf), f0 * R_START / nf);
    let sys = Radial { n: nf, q, eps, outcome: Shot::Undecided };
    let mut solver = Dopri5::new(sys, R_START, r_end, 0.0, y0, rtol, rtol * 1e-6 * u0);
    let mut dense = ContinuousOutputModel::default();
    solver
        .integrate_with_continuous_output_model(&mut dense)
        .map_err(|e| Error::Bracket(format!("shooting integration failed: {e}")))?;
    let stop = *solver.x_out().last().unwrap_or(&R_START);
    let outcome = {
        let y = solver.y_out().last().copied().unwrap_or(y0);
        if y[0] < 0.0 {
            Shot::Crossed
        } else if y[1] > 0.0 {
            Shot::Turned
        } else {
            Shot::Undecided
        }
    };
    Ok((outcome, dense, stop))
}

/// The decaying positive radial solution of u″ + (N−1)/r·u′ = εu − u^{q−1}
/// found by bisection on u(0).
#[derive(Clone, Debug)]
pub struct ShootingProfile {
    pub u0: f64,
    pub field: RadialField<f64>,
    /// Radius beyond which the profile is the exponential tail fit.
    pub matched_at: f64,
}

/// Bisection on u(0) with adaptive Dormand–Prince stepping at relative
/// tolerance `rtol`; the profile is sampled onto `grid`.
pub fn shooting_profile(n: usize, q: f64, eps: f64, grid: &Arc<RadialGrid<f64>>, rtol: f64) -> Result<ShootingProfile> {
    let nf = n as f64;
    if n < 3 || grid.dim() != n {
        return invalid(format!("shooting needs N ≥ 3 matching the grid, got N = {n}"));
    }
    let star = 2.0 * nf / (nf - 2.0);
    if !(q > 2.0 && q < star) {
        return invalid(format!("shooting needs 2 < q < 2* = {star}, got q = {q}"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("ε = {eps} must be positive"));
    }
    // work at ε = 1 and rescale: u_ε(r) = ε^{1/(q−2)} u₁(√ε r)
    let r_end = 200.0;
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut guard = 0;
    while shoot(n, q, 1.0, hi, r_end, rtol)?.0 != Shot::Crossed {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Bracket("no overshooting u(0) found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(n, q, 1.0, mid, r_end, rtol)?.0 {
            Shot::Crossed => hi = mid,
            _ => lo = mid,
        }
    }
    let (_, dense, stop) = shoot(n, q, 1.0, lo, r_end, rtol)?;
    // exponential tail u ≈ c r^{−(N−1)/2} e^{−r}, matched well inside the stop
    // radius where the shot still tracks the decaying solution
    let (r_lo, _) = dense.bounds();
    let at = |r: f64| if r <= R_START { lo } else { dense.evaluate(r).map(|y| y[0]).unwrap_or(0.0) };
    let match_r = (stop - 3.0).max(r_lo);
    let c = at(match_r) * match_r.powf(0.5 * (nf - 1.0)) * match_r.exp();
    let a = eps.powf(1.0 / (q - 2.0));
    let b = eps.sqrt();
    let values = grid
        .nodes()
        .iter()
        .map(|&r| {
            let x = b * r;
            let v = if x < match_r {
                if x <= R_START {
                    let f0 = lo - lo.powf(q - 1.0);
                    lo + f0 * x * x / (2.0 * nf)
                } else {
                    at(x)
                }
            } else {
                c * x.powf(-0.5 * (nf - 1.0)) * (-x).exp()
            };
            a * v
        })
        .collect::<Vec<_>>();
    let mut values = values;
    if let Some(last) = values.last_mut() {
        *last = 0.0;
    }
    Ok(ShootingProfile { u0: a * lo, field: RadialField::new(Arc::clone(grid), values)?, matched_at: match_r / b })
}

/// The shooting profile packaged with the certificates of the pure power
/// functional (1, ε, 0, 1).
pub fn shooting_oracle(n: usize, q: f64, eps: f64, grid: &Arc<RadialGrid<f64>>) -> Result<GroundState<f64>> {
    let start = Instant::now();
    let prof = shooting_profile(n, q, eps, grid, 1e-12)?;
    let model = Model { n, alpha: 0.0, p: 1.0, q, coeffs: FunctionalCoefficients::new(1.0, eps, 0.0, 1.0) };
    let (terms, nehari, pz, el) = certify(&prof.field, &model, None)?;
    Ok(GroundState {
        peak: prof.u0,
        action: terms.action(&model.coeffs, model.p, q),
        field: prof.field.clone(),
        model,
        params: None,
        internal_field: prof.field,
        internal_model: model,
        scaling: Scaling::identity(),
        terms,
        energy: terms.grad2 / 2.0 - terms.lq / q,
        nehari_residual: nehari,
        pohozaev_residual: pz,
        el_residual: el,
        iterations: 0,
        converged: true,
        history: Vec::new(),
        seconds: start.elapsed().as_secs_f64(),
    })
}
