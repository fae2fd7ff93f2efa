use crate::asymptotics::sweep::{log_spaced, run_sweep, Sweep, SweepPlan};
use crate::error::{invalid, Error, Result};
use crate::functionals::ProblemParams;
use crate::scalar::Scalar;
use crate::solver::{continue_branch, GroundState, OperatorCache, SolverConfig};

/// Relative mass error at which a root is accepted.
pub const MASS_TOL: f64 = 1e-6;

/// A parameter with M(param) = c².
#[derive(Clone, Debug)]
pub struct MassRoot<T: Scalar> {
    pub param: T,
    pub mass: T,
    /// |M − c²|/c².
    pub relative_error: T,
    pub state: GroundState<T>,
    /// Solves spent refining this root.
    pub solves: usize,
}

/// All roots found along a computed branch.
#[derive(Clone, Debug)]
pub struct Inversion<T: Scalar> {
    pub roots: Vec<MassRoot<T>>,
    /// Why the list is empty, when it is.
    pub note: Option<String>,
}

fn defect<T: Scalar>(state: &GroundState<T>, c2: T) -> T {
    (state.mass() / c2).ln()
}

fn root<T: Scalar>(state: GroundState<T>, param: T, c2: T, solves: usize) -> MassRoot<T> {
    let mass = state.mass();
    MassRoot { param, mass, relative_error: ((mass - c2) / c2).abs(), state, solves }
}

/// Refines a sign change of ln(M/c²) between two converged states by
/// Illinois regula falsi in ln(param), each solve warm-started from the
/// nearer end of the current bracket.
fn refine<T: Scalar>(
    c2: T,
    base: &ProblemParams<T>,
    lo: (T, &GroundState<T>),
    hi: (T, &GroundState<T>),
    config: &SolverConfig<T>,
    cache: &mut OperatorCache<T>,
) -> Result<MassRoot<T>> {
    let tol = T::of(MASS_TOL);
    let (mut xa, mut sa) = (lo.0.ln(), lo.1.clone());
    let (mut xb, mut sb) = (hi.0.ln(), hi.1.clone());
    let (mut ga, mut gb) = (defect(&sa, c2), defect(&sb, c2));
    let mut side = 0i8;
    for k in 1..=80 {
        let x = (xa * gb - xb * ga) / (gb - ga);
        let param = x.exp();
        let seed = if (x - xa).abs() <= (xb - x).abs() { &sa } else { &sb };
        let p = base.with_formulation(base.formulation.with_value(param))?;
        let s = continue_branch(seed, &p, config, cache)?;
        if !s.converged {
            return Err(Error::Bracket(format!("solve at {param:e} did not converge while inverting the mass map")));
        }
        let g = defect(&s, c2);
        if ((s.mass() - c2) / c2).abs() <= tol || (xb - xa).abs() <= T::of(1e-14) {
            return Ok(root(s, param, c2, k));
        }
        if (g > T::zero()) == (ga > T::zero()) {
            (xa, ga, sa) = (x, g, s);
            if side == -1 {
                gb = gb / T::of(2.0);
            }
            side = -1;
        } else {
            (xb, gb, sb) = (x, g, s);
            if side == 1 {
                ga = ga / T::of(2.0);
            }
            side = 1;
        }
    }
    Err(Error::Bracket(format!("mass map inversion for c² = {c2} did not reach {MASS_TOL:e}")))
}

/// Roots of M(param) = c² between consecutive converged points of a sweep.
pub fn mass_map_roots<T: Scalar>(
    c2: T,
    sweep: &Sweep<T>,
    config: &SolverConfig<T>,
    cache: &mut OperatorCache<T>,
) -> Result<Inversion<T>> {
    if !(c2 > T::zero() && c2.is_finite()) {
        return invalid(format!("target mass c² = {c2} must be positive"));
    }
    let pts: Vec<(T, &GroundState<T>)> =
        sweep.converged().map(|(r, s)| (T::of(r.param), s)).collect();
    let mut roots = Vec::new();
    for (k, &(x, s)) in pts.iter().enumerate() {
        let g = defect(s, c2);
        if g == T::zero() {
            roots.push(root(s.clone(), x, c2, 0));
            continue;
        }
        if let Some(&(y, t)) = pts.get(k + 1) {
            let h = defect(t, c2);
            if h != T::zero() && (g > T::zero()) != (h > T::zero()) {
                roots.push(refine(c2, &sweep.params, (x, s), (y, t), config, cache)?);
            }
        }
    }
    let note = if roots.is_empty() {
        let (lo, hi) = pts.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), (_, s)| {
            (a.min(s.mass()), b.max(s.mass()))
        });
        Some(format!("c² = {c2} not crossed; sampled M ranges over [{lo}, {hi}]"))
    } else {
        None
    };
    Ok(Inversion { roots, note })
}

/// Samples M on `per_decade` log-spaced points of `bracket` by a warm
/// sweep and returns every root of M = c² found along the branch.
pub fn mass_map_invert<T: Scalar>(
    c2: T,
    bracket: (T, T),
    params: &ProblemParams<T>,
    config: &SolverConfig<T>,
    per_decade: usize,
    cache: &mut OperatorCache<T>,
) -> Result<Inversion<T>> {
    let values = log_spaced(bracket.0, bracket.1, per_decade)?;
    let sweep = run_sweep(&SweepPlan::new(*params, values, config.clone()), cache)?;
    mass_map_roots(c2, &sweep, config, cache)
}
