use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functionals::{FunctionalCoefficients, ProblemParams, Terms};
use crate::profiles::bubble::{profile_terms, resolve_u_amplitude, ProfileSpec};
use crate::radial::RadialGrid;
use crate::riesz::RieszOperator;
use crate::scalar::Scalar;
use crate::solver::{solve_model, GroundState, Model, OperatorCache, SolverConfig};

/// Grid and operator cache shared by profile computations. Profiles decay
/// algebraically, so the default grid is wide and strongly graded.
pub struct ProfileLab<T: Scalar> {
    grid: Arc<RadialGrid<T>>,
    cache: OperatorCache<T>,
}

impl<T: Scalar> ProfileLab<T> {
    pub fn new(grid: Arc<RadialGrid<T>>) -> Self {
        Self { grid, cache: OperatorCache::new() }
    }

    /// R = 1000, M = 2000, γ = 3.
    pub fn for_dim(n: usize) -> Result<Self> {
        Ok(Self::new(Arc::new(RadialGrid::new(n, T::of(1000.0), 2000, T::of(3.0))?)))
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn operator(&mut self, alpha: T) -> Result<Arc<RieszOperator<T>>> {
        self.cache.get(&self.grid, alpha)
    }

    pub fn cache(&mut self) -> &mut OperatorCache<T> {
        &mut self.cache
    }

    fn check(&self, params: &ProblemParams<T>) -> Result<()> {
        if params.n != self.grid.dim() {
            return Err(Error::GridMismatch(format!("N = {} on a grid for N = {}", params.n, self.grid.dim())));
        }
        Ok(())
    }
}

/// Which limit regime a ρ₀ belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rho0Kind {
    /// p = (N+α)/N, q < 2 + 4/N: U_ρ₀.
    LowerChoquard,
    /// p = (N+α)/(N−2), N ≥ 5: V_ρ₀.
    UpperChoquard,
    /// q = 2*, N ≥ 5: W_ρ₀.
    Sobolev,
}

/// The dilation ρ₀ selected among the limit profiles by the subleading
/// term:
/// lower: (2q‖∇U₁‖²/(N(q−2)‖U₁‖_q^q))^{2/(4−N(q−2))},
/// upper: (2(2*−q)‖V₁‖_q^q/(q(2*−2)‖V₁‖²))^{2/((N−2)(q−2))},
/// Sobolev: ([(N+α)−p(N−2)]D_p(W₁)/(2p‖W₁‖²))^{1/((N−2)(p−1)−α)}.
/// Integrals include the closed-form tails beyond the grid.
pub fn rho0<T: Scalar>(kind: Rho0Kind, params: &ProblemParams<T>, lab: &mut ProfileLab<T>) -> Result<T> {
    lab.check(params)?;
    let n = params.n;
    let (nf, two) = (T::of_usize(n), T::of(2.0));
    let (alpha, p, q) = (params.alpha, params.p, params.q);
    let two_star = params.two_star();
    match kind {
        Rho0Kind::LowerChoquard => {
            if !params.is_p_lower() {
                return Err(Error::Regime(format!("U-profile needs p = (N+α)/N, got p = {p}")));
            }
            let slope = T::of(4.0) - nf * (q - two);
            if slope <= T::zero() {
                return Err(Error::Regime(format!("U-profile scaling needs q < 2 + 4/N, got q = {q}")));
            }
            let op = lab.operator(alpha)?;
            let a = resolve_u_amplitude(&op)?.value;
            let t = profile_terms(&ProfileSpec::u(n, a, T::one())?, &lab.grid, None, p, q)?;
            Ok((two * q * t.grad2 / (nf * (q - two) * t.lq)).powf(two / slope))
        }
        Rho0Kind::UpperChoquard => {
            if !params.is_p_upper() {
                return Err(Error::Regime(format!("V-profile needs p = (N+α)/(N−2), got p = {p}")));
            }
            if n < 5 {
                return Err(Error::Regime(format!("‖V₁‖₂ is infinite for N = {n} < 5")));
            }
            let t = profile_terms(&ProfileSpec::v(n, T::one())?, &lab.grid, None, p, q)?;
            let base = two * (two_star - q) * t.lq / (q * (two_star - two) * t.mass);
            Ok(base.powf(two / ((nf - two) * (q - two))))
        }
        Rho0Kind::Sobolev => {
            if !params.is_q_critical() {
                return Err(Error::Regime(format!("W-profile needs q = 2*, got q = {q}")));
            }
            if n < 5 {
                return Err(Error::Regime(format!("‖W₁‖₂ is infinite for N = {n} < 5")));
            }
            let e = (nf - two) * (p - T::one()) - alpha;
            if e.abs() <= T::of(1e-12) {
                return Err(Error::Regime("(N−2)(p−1) = α: ρ₀ is not determined".into()));
            }
            let op = lab.operator(alpha)?;
            let t = profile_terms(&ProfileSpec::w(n, T::one())?, &lab.grid, Some(&op), p, q)?;
            let base = ((nf + alpha) - p * (nf - two)) * t.dpp / (two * p * t.mass);
            Ok(base.powf(T::one() / e))
        }
    }
}

/// The best constants of the limit problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstantKind {
    /// S = inf ‖∇w‖₂²/‖w‖_{2*}², attained at W₁.
    S,
    /// S₁ = inf ‖u‖₂²/D_{(N+α)/N}(u)^{N/(N+α)}, attained at U₁.
    S1,
    /// S_α = inf ‖∇v‖₂²/D_{(N+α)/(N−2)}(v)^{(N−2)/(N+α)}, attained at V₁.
    SAlpha,
    /// S_p = inf (‖∇v‖₂² + ‖v‖₂²)/D_p(v)^{1/p}, at the Choquard ground state.
    Sp,
    /// S_q = inf (‖∇v‖₂² + ‖v‖₂²)/‖v‖_q^2, at the power ground state.
    Sq,
}

/// The quotient defining `kind`, evaluated on precomputed integrals. For S₁
/// and S_α the exponent p must be the matching critical one.
pub fn quotient<T: Scalar>(kind: ConstantKind, terms: &Terms<T>, p: T, q: T) -> T {
    let two = T::of(2.0);
    match kind {
        ConstantKind::S => terms.grad2 / terms.lq.powf(two / q),
        ConstantKind::S1 => terms.mass / terms.dpp.powf(T::one() / p),
        ConstantKind::SAlpha => terms.grad2 / terms.dpp.powf(T::one() / p),
        ConstantKind::Sp => (terms.grad2 + terms.mass) / terms.dpp.powf(T::one() / p),
        ConstantKind::Sq => (terms.grad2 + terms.mass) / terms.lq.powf(two / q),
    }
}

/// Value of a best constant. S, S₁ and S_α are quotients of the explicit
/// extremals (tails included); S_p and S_q are quotients of computed
/// ground states of the limit equations. Only the exponents of `params`
/// that the constant involves are used.
pub fn best_constant<T: Scalar>(
    kind: ConstantKind,
    params: &ProblemParams<T>,
    lab: &mut ProfileLab<T>,
    config: &SolverConfig<T>,
) -> Result<T> {
    lab.check(params)?;
    let n = params.n;
    let (nf, two) = (T::of_usize(n), T::of(2.0));
    let alpha = params.alpha;
    match kind {
        ConstantKind::S => {
            let q = params.two_star();
            let t = profile_terms(&ProfileSpec::w(n, T::one())?, &lab.grid, None, two, q)?;
            Ok(quotient(kind, &t, two, q))
        }
        ConstantKind::S1 => {
            let p = (nf + alpha) / nf;
            let op = lab.operator(alpha)?;
            let a = resolve_u_amplitude(&op)?.value;
            let t = profile_terms(&ProfileSpec::u(n, a, T::one())?, &lab.grid, Some(&op), p, two)?;
            Ok(quotient(kind, &t, p, two))
        }
        ConstantKind::SAlpha => {
            let p = (nf + alpha) / (nf - two);
            let op = lab.operator(alpha)?;
            let t = profile_terms(&ProfileSpec::v(n, T::one())?, &lab.grid, Some(&op), p, two)?;
            Ok(quotient(kind, &t, p, two))
        }
        ConstantKind::Sp => {
            let gs = limit_ground_state(LimitKind::Choquard, params, config, lab.cache())?;
            Ok(quotient(kind, &gs.terms, params.p, params.q))
        }
        ConstantKind::Sq => {
            let gs = limit_ground_state(LimitKind::Power, params, config, lab.cache())?;
            Ok(quotient(kind, &gs.terms, params.p, params.q))
        }
    }
}

/// The ε-independent limit equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitKind {
    /// −Δv + v = (I_α∗|v|^p)|v|^{p−2}v.
    Choquard,
    /// −Δv + v = |v|^{q−2}v.
    Power,
}

/// Ground state of a limit equation with the exponents of `params`.
pub fn limit_ground_state<T: Scalar>(
    kind: LimitKind,
    params: &ProblemParams<T>,
    config: &SolverConfig<T>,
    cache: &mut OperatorCache<T>,
) -> Result<GroundState<T>> {
    let coeffs = match kind {
        LimitKind::Choquard => FunctionalCoefficients::pure_choquard(),
        LimitKind::Power => FunctionalCoefficients::pure_power(),
    };
    let model = Model { n: params.n, alpha: params.alpha, p: params.p, q: params.q, coeffs };
    solve_model(&model, config, cache)
}

/// ‖v‖₂², ‖∇v‖₂² and the action of the limit ground state predicted from its
/// best constant:
/// Choquard: ((N+α−p(N−2))/2p, (N(p−1)−α)/2p, (p−1)/2p)·S_p^{p/(p−1)};
/// power: ((2N−q(N−2))/2q, N(q−2)/2q, (q−2)/2q)·S_q^{q/(q−2)}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitNorms<T> {
    pub mass: T,
    pub grad2: T,
    pub action: T,
}

pub fn limit_norms<T: Scalar>(kind: LimitKind, params: &ProblemParams<T>, constant: T) -> LimitNorms<T> {
    let (nf, two) = (T::of_usize(params.n), T::of(2.0));
    let (alpha, p, q) = (params.alpha, params.p, params.q);
    match kind {
        LimitKind::Choquard => {
            let s = constant.powf(p / (p - T::one()));
            LimitNorms {
                mass: (nf + alpha - p * (nf - two)) / (two * p) * s,
                grad2: (nf * (p - T::one()) - alpha) / (two * p) * s,
                action: (p - T::one()) / (two * p) * s,
            }
        }
        LimitKind::Power => {
            let s = constant.powf(q / (q - two));
            LimitNorms {
                mass: (two * nf - q * (nf - two)) / (two * q) * s,
                grad2: nf * (q - two) / (two * q) * s,
                action: (q - two) / (two * q) * s,
            }
        }
    }
}
