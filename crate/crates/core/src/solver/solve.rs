use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{invalid, Result};
use crate::functionals::{
    nehari_dilation_min, nehari_scale, pohozaev_relative, Evaluation, Formulation, FunctionalCoefficients, ProblemParams, Terms,
};
use crate::radial::{RadialField, RadialGrid};
use crate::riesz::RieszOperator;
use crate::scalar::Scalar;
use crate::solver::config::{InitialGuess, SolverConfig};
use crate::solver::tridiag::Tridiagonal;

/// A concrete functional: dimension, exponents and coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Model<T> {
    pub n: usize,
    pub alpha: T,
    pub p: T,
    pub q: T,
    pub coeffs: FunctionalCoefficients<T>,
}

impl<T: Scalar> Model<T> {
    /// The functional whose critical points solve the problem as posed.
    pub fn from_params(params: &ProblemParams<T>) -> Self {
        let coeffs = match params.formulation {
            Formulation::Frequency(eps) => FunctionalCoefficients::action(eps),
            Formulation::Lambda(l) => FunctionalCoefficients::lambda_form(l),
            Formulation::Mu(m) => FunctionalCoefficients::mu_form(m),
        };
        Self { n: params.n, alpha: params.alpha, p: params.p, q: params.q, coeffs }
    }

    pub fn needs_operator(&self) -> bool {
        self.coeffs.a_choq > T::zero()
    }
}

/// u(x) = a·v(b·x) between problem and iterated coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaling<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Scaling<T> {
    pub fn identity() -> Self {
        Self { a: T::one(), b: T::one() }
    }
}

/// The λ- or μ-form equivalent to the frequency problem, whichever has its
/// coefficient at most one:
/// λ = ε^{Λ₁} with u = ε^{(2+α)/(4(p−1))} v(ε^{1/2}x), or
/// μ = ε^{Λ₂} with u = ε^{1/(q−2)} v(ε^{1/2}x).
/// λ- and μ-form problems are iterated as given.
pub fn internal_form<T: Scalar>(params: &ProblemParams<T>) -> (ProblemParams<T>, Scaling<T>) {
    let Formulation::Frequency(eps) = params.formulation else {
        return (*params, Scaling::identity());
    };
    let lambda = eps.powf(params.lambda1());
    let b = eps.sqrt();
    let two = T::of(2.0);
    if lambda <= T::one() {
        let a = eps.powf((two + params.alpha) / (T::of(4.0) * (params.p - T::one())));
        (ProblemParams { formulation: Formulation::Lambda(lambda), ..*params }, Scaling { a, b })
    } else {
        let mu = eps.powf(params.lambda2());
        let a = eps.powf(T::one() / (params.q - two));
        (ProblemParams { formulation: Formulation::Mu(mu), ..*params }, Scaling { a, b })
    }
}

/// Riesz operators keyed by grid fingerprint and α, reused across solves.
#[derive(Default)]
pub struct OperatorCache<T: Scalar> {
    ops: HashMap<(u64, u64), Arc<RieszOperator<T>>>,
}

impl<T: Scalar> OperatorCache<T> {
    pub fn new() -> Self {
        Self { ops: HashMap::new() }
    }

    pub fn get(&mut self, grid: &Arc<RadialGrid<T>>, alpha: T) -> Result<Arc<RieszOperator<T>>> {
        let key = (grid.hash(), alpha.as_f64().to_bits());
        if let Some(op) = self.ops.get(&key) {
            return Ok(Arc::clone(op));
        }
        let op = Arc::new(RieszOperator::build(Arc::clone(grid), alpha)?);
        self.ops.insert(key, Arc::clone(&op));
        Ok(op)
    }
}

/// A computed state with its certificates.
#[derive(Clone, Debug)]
pub struct GroundState<T: Scalar> {
    /// The state in the coordinates of the posed problem.
    pub field: RadialField<T>,
    pub model: Model<T>,
    pub params: Option<ProblemParams<T>>,
    /// The iterated state and functional, with u(x) = a·v(bx).
    pub internal_field: RadialField<T>,
    pub internal_model: Model<T>,
    pub scaling: Scaling<T>,
    /// ‖∇u‖₂², ‖u‖₂², D_p(u), ‖u‖_q^q.
    pub terms: Terms<T>,
    /// Value of the posed functional at u.
    pub action: T,
    /// ½‖∇u‖₂² − D_p/(2p) − ‖u‖_q^q/q.
    pub energy: T,
    pub nehari_residual: T,
    pub pohozaev_residual: T,
    pub el_residual: T,
    pub iterations: usize,
    pub converged: bool,
    /// u(0), extrapolated.
    pub peak: T,
    /// Accepted action values of the iterated functional.
    pub history: Vec<T>,
    pub seconds: f64,
}

impl<T: Scalar> GroundState<T> {
    /// ‖u‖₂².
    pub fn mass(&self) -> T {
        self.terms.mass
    }
}

struct Iterated<T: Scalar> {
    v: RadialField<T>,
    iterations: usize,
    history: Vec<T>,
}

/// Smallest |ln t| of a dilation minimizer that is applied to the iterate.
const DILATION_MIN: f64 = 1e-3;

/// Preconditioned descent with Nehari projection:
/// v ← NehariProject(v − τ G⁻¹R(v)), G = a_g(−Δ_h) + a_m, followed by a
/// line minimization along the dilation curve in the Nehari manifold.
fn iterate<T: Scalar>(
    model: &Model<T>,
    grid: &Arc<RadialGrid<T>>,
    op: Option<&RieszOperator<T>>,
    config: &SolverConfig<T>,
    seed: RadialField<T>,
) -> Result<Iterated<T>> {
    let (p, q, c) = (model.p, model.q, model.coeffs);
    let (lo, di, up) = grid.neg_laplacian_tridiag();
    let scale = |v: Vec<T>| v.into_iter().map(|x| x * c.a_grad).collect::<Vec<_>>();
    let di: Vec<T> = scale(di).into_iter().map(|x| x + c.a_mass).collect();
    let precond = Tridiagonal::factor(scale(lo), di, scale(up));
    let m = grid.len();

    let project = |v: RadialField<T>| -> Result<(RadialField<T>, Evaluation<T>)> {
        let mut ev = Evaluation::new(&v, op, p, q)?;
        let t = nehari_scale(ev.terms.quadratic(&c), c.a_choq * ev.terms.dpp, c.a_pow * ev.terms.lq, p, q)?;
        ev.terms = ev.terms.scaled(t, p, q);
        let tp = t.powf(p);
        ev.potential.iter_mut().for_each(|x| *x *= tp);
        Ok((v.scale(t), ev))
    };

    let mut vals = seed.into_values();
    vals[m - 1] = T::zero();
    if config.clamp {
        vals.iter_mut().for_each(|x| *x = x.max(T::zero()));
    }
    // a far-off minimizer along the Nehari dilation curve is applied by
    // relabeling and resampling; it moves the iterate along the flat
    // dilation direction that the preconditioned step barely sees
    let refit = |v: RadialField<T>, ev: Evaluation<T>| -> Result<(RadialField<T>, Evaluation<T>)> {
        let Ok((t, _, _)) = nehari_dilation_min(&ev.terms, &c, model.n, model.alpha, p, q) else {
            return Ok((v, ev));
        };
        if t.ln().abs() <= T::of(DILATION_MIN) {
            return Ok((v, ev));
        }
        let mut vals = v.dilate(t)?.resample(Arc::clone(grid))?.into_values();
        vals[m - 1] = T::zero();
        if config.clamp {
            vals.iter_mut().for_each(|x| *x = x.max(T::zero()));
        }
        match project(RadialField::new(Arc::clone(grid), vals)?) {
            Ok((w, wev)) if wev.terms.action(&c, p, q) < ev.terms.action(&c, p, q) => Ok((w, wev)),
            _ => Ok((v, ev)),
        }
    };
    let (v0, ev0) = project(RadialField::new(Arc::clone(grid), vals)?)?;
    let (mut v, mut ev) = refit(v0, ev0)?;
    let mut value = ev.terms.action(&c, p, q);
    let mut history = vec![value];
    let mut step = config.step;
    let slack = T::epsilon() * T::of(64.0);
    let mut iterations = 0;
    while iterations < config.max_iters {
        let (res, rel) = ev.residual(&v, &c, p, q)?;
        if rel <= config.tol {
            break;
        }
        iterations += 1;
        let mut dir = res[..m - 1].to_vec();
        precond.solve(&mut dir);
        let floor = slack * (value.abs() + ev.terms.quadratic(&c));
        let mut accepted = false;
        while step >= T::of(1e-12) {
            let mut cand: Vec<T> = v.values()[..m - 1].iter().zip(&dir).map(|(&x, &d)| x - step * d).collect();
            cand.push(T::zero());
            if config.clamp {
                cand.iter_mut().for_each(|x| *x = x.max(T::zero()));
            }
            let trial = RadialField::new(Arc::clone(grid), cand)?;
            if let Ok((nv, nev)) = project(trial) {
                let nval = nev.terms.action(&c, p, q);
                if nval <= value + floor {
                    (v, ev) = refit(nv, nev)?;
                    value = ev.terms.action(&c, p, q);
                    history.push(value);
                    accepted = true;
                    break;
                }
            }
            step *= config.backtrack;
        }
        if !accepted {
            break;
        }
        step = (step / config.backtrack).min(config.step);
    }
    Ok(Iterated { v, iterations, history })
}

fn seed_field<T: Scalar>(
    config: &SolverConfig<T>,
    grid: &Arc<RadialGrid<T>>,
    scaling: Scaling<T>,
) -> Result<RadialField<T>> {
    match &config.guess {
        InitialGuess::Gaussian { amplitude, width } => {
            let (a, w) = (*amplitude, *width);
            RadialField::from_fn(Arc::clone(grid), |r| a * (-(r * r) / (T::of(2.0) * w * w)).exp())
        }
        InitialGuess::Seed(u) => {
            // v(y) = u(y/b)/a
            let v = u.power_rescale(T::one() / scaling.a, T::one() / scaling.b)?;
            let g = v.grid();
            let close = (g.radius() / grid.radius() - T::one()).abs() <= T::of(1e-12);
            if g.dim() == grid.dim() && g.len() == grid.len() && g.gamma() == grid.gamma() && close {
                RadialField::new(Arc::clone(grid), v.into_values())
            } else {
                v.resample(Arc::clone(grid))
            }
        }
    }
}

/// Certificates of `u` for `model`, computed from scratch.
pub(crate) fn certify<T: Scalar>(
    u: &RadialField<T>,
    model: &Model<T>,
    op: Option<&RieszOperator<T>>,
) -> Result<(Terms<T>, T, T, T)> {
    let (p, q, c) = (model.p, model.q, model.coeffs);
    let ev = Evaluation::new(u, op, p, q)?;
    let (_, el) = ev.residual(u, &c, p, q)?;
    let pz = pohozaev_relative(&ev.terms, &c, model.n, model.alpha, p, q);
    Ok((ev.terms, ev.terms.nehari_relative(&c), pz, el))
}

/// Solves the model directly (no change of coordinates) with operators
/// drawn from `cache`.
pub fn solve_model<T: Scalar>(
    model: &Model<T>,
    config: &SolverConfig<T>,
    cache: &mut OperatorCache<T>,
) -> Result<GroundState<T>> {
    solve_scaled(model, model, Scaling::identity(), None, config, cache)
}

fn solve_scaled<T: Scalar>(
    model: &Model<T>,
    internal: &Model<T>,
    scaling: Scaling<T>,
    params: Option<ProblemParams<T>>,
    config: &SolverConfig<T>,
    cache: &mut OperatorCache<T>,
) -> Result<GroundState<T>> {
    config.validate()?;
    if !internal.coeffs.is_valid() || internal.coeffs.a_grad <= T::zero() {
        return invalid(format!("coefficients {:?} cannot be iterated", internal.coeffs));
    }
    let start = Instant::now();
    let radius = config.grid.radius_for(internal);
    let grid = Arc::new(RadialGrid::new(internal.n, radius, config.grid.nodes, config.grid.gamma_for(radius))?);
    let op = if internal.needs_operator() { Some(cache.get(&grid, internal.alpha)?) } else { None };
    let seed = seed_field(config, &grid, scaling)?;
    let it = iterate(internal, &grid, op.as_deref(), config, seed)?;

    let u = it.v.power_rescale(scaling.a, scaling.b)?;
    let op_u = match &op {
        Some(o) => Some(o.for_grid(u.grid())?),
        None => None,
    };
    let (terms, nehari, pz, el) = certify(&u, model, op_u.as_ref())?;
    let (p, q) = (model.p, model.q);
    let two = T::of(2.0);
    let energy = terms.grad2 / two - terms.dpp / (two * p) - terms.lq / q;
    let converged =
        el <= config.tol && pz <= T::of(10.0) * config.tol && nehari <= config.tol && u.is_ground_state_candidate();
    Ok(GroundState {
        peak: u.peak_value(),
        action: terms.action(&model.coeffs, p, q),
        field: u,
        model: *model,
        params,
        internal_field: it.v,
        internal_model: *internal,
        scaling,
        terms,
        energy,
        nehari_residual: nehari,
        pohozaev_residual: pz,
        el_residual: el,
        iterations: it.iterations,
        converged,
        history: it.history,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Ground state of the posed problem. Frequency problems are iterated in
/// their λ- or μ-form and mapped back by relabeling.
pub fn solve<T: Scalar>(params: &ProblemParams<T>, config: &SolverConfig<T>) -> Result<GroundState<T>> {
    solve_cached(params, config, &mut OperatorCache::new())
}

pub fn solve_cached<T: Scalar>(
    params: &ProblemParams<T>,
    config: &SolverConfig<T>,
    cache: &mut OperatorCache<T>,
) -> Result<GroundState<T>> {
    let params = ProblemParams::new(params.n, params.alpha, params.p, params.q, params.formulation)?;
    let (inner, scaling) = internal_form(&params);
    solve_scaled(&Model::from_params(&params), &Model::from_params(&inner), scaling, Some(params), config, cache)
}

/// Warm start from a neighboring state: its field, mapped through the new
/// problem's change of coordinates, seeds the solve.
pub fn continue_branch<T: Scalar>(
    prev: &GroundState<T>,
    new_params: &ProblemParams<T>,
    config: &SolverConfig<T>,
    cache: &mut OperatorCache<T>,
) -> Result<GroundState<T>> {
    if prev.params.as_ref() == Some(new_params) {
        return Ok(prev.clone());
    }
    if let Some(old) = &prev.params {
        if (old.n, old.alpha, old.p, old.q) != (new_params.n, new_params.alpha, new_params.p, new_params.q)
            || old.formulation.name() != new_params.formulation.name()
        {
            return invalid("continuation may only change the formulation parameter");
        }
    }
    let mut cfg = config.clone();
    cfg.guess = InitialGuess::Seed(prev.field.clone());
    solve_cached(new_params, &cfg, cache)
}
