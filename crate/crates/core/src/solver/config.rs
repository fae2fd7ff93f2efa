use crate::error::{invalid, Result};
use crate::radial::RadialField;
use crate::functionals::CRITICAL_TOL;
use crate::scalar::Scalar;
use crate::solver::solve::Model;

/// Initial iterate of a solve.
#[derive(Clone, Debug)]
pub enum InitialGuess<T: Scalar> {
    /// a·exp(−r²/(2w²)) in the coordinates of the problem actually iterated.
    Gaussian { amplitude: T, width: T },
    /// A field, resampled onto the solver grid when it lives elsewhere.
    Seed(RadialField<T>),
}

/// Grid used by a solve. Unset `radius` and `gamma` follow the model, see
/// [`GridSpec::radius_for`] and [`GridSpec::gamma_for`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub nodes: usize,
    pub gamma: Option<T>,
    pub radius: Option<T>,
}

impl<T: Scalar> Default for GridSpec<T> {
    fn default() -> Self {
        Self { nodes: 2000, gamma: None, radius: None }
    }
}

/// Relative mass the truncation of an algebraic tail may cut off.
const TAIL_CUT: f64 = 1e-9;
/// Largest radius the default rule picks.
const RADIUS_CAP: f64 = 1e8;

impl<T: Scalar> GridSpec<T> {
    /// Default truncation radius for the iterated model: 30/√a_mass (at least
    /// 30, at most 300) for exponentially decaying states. Choquard states
    /// with p < 2 decay like r^{−k}, k = (N−α)/(2−p); the radius is then
    /// stretched by TAIL_CUT^{−1/(2k−N)}/6 so the mass beyond it is about
    /// TAIL_CUT, and multiplied by λ^{−2/(4−N(q−2))} for the spreading
    /// λ-form at the lower critical exponent.
    pub fn radius_for(&self, model: &Model<T>) -> T {
        if let Some(r) = self.radius {
            return r;
        }
        let c = &model.coeffs;
        let base = if c.a_mass > T::zero() { T::of(30.0) / c.a_mass.sqrt() } else { T::of(300.0) };
        let base = base.max(T::of(30.0)).min(T::of(300.0));
        let (nf, two) = (T::of_usize(model.n), T::of(2.0));
        let (alpha, p, q) = (model.alpha, model.p, model.q);
        if !(model.needs_operator() && p < two) {
            return base;
        }
        let k = (nf - alpha) / (two - p);
        let excess = (two * k - nf).max(T::of(0.5));
        let mut stretch = T::of(TAIL_CUT).powf(-T::one() / excess) / T::of(6.0);
        let lower = (p - (nf + alpha) / nf).abs() <= T::of(CRITICAL_TOL);
        let slope = T::of(4.0) - nf * (q - two);
        if lower && c.a_pow > T::zero() && c.a_pow < T::one() && slope > T::zero() {
            stretch *= c.a_pow.powf(-two / slope);
        }
        (base * stretch.max(T::one())).min(T::of(RADIUS_CAP))
    }

    /// Grading exponent: 2, or 3 on radii stretched beyond 300 so the core
    /// keeps enough nodes.
    pub fn gamma_for(&self, radius: T) -> T {
        self.gamma.unwrap_or_else(|| if radius > T::of(300.0) { T::of(3.0) } else { T::of(2.0) })
    }
}

/// Iteration controls.
#[derive(Clone, Debug)]
pub struct SolverConfig<T: Scalar> {
    pub max_iters: usize,
    /// Relative strong-form residual at which iteration stops.
    pub tol: T,
    /// Initial and maximal step.
    pub step: T,
    /// Step reduction on a rejected step.
    pub backtrack: T,
    pub guess: InitialGuess<T>,
    /// Clamp negative values to zero before projecting.
    pub clamp: bool,
    pub grid: GridSpec<T>,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: T::of(1e-8),
            step: T::one(),
            backtrack: T::of(0.5),
            guess: InitialGuess::Gaussian { amplitude: T::one(), width: T::one() },
            clamp: true,
            grid: GridSpec::default(),
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero() && self.tol.is_finite()) {
            return invalid(format!("tolerance {} must be positive", self.tol));
        }
        if !(self.step > T::zero() && self.step.is_finite()) {
            return invalid(format!("step {} must be positive", self.step));
        }
        if !(self.backtrack > T::zero() && self.backtrack < T::one()) {
            return invalid(format!("backtracking factor {} must lie in (0, 1)", self.backtrack));
        }
        if self.max_iters == 0 {
            return invalid("max_iters must be positive");
        }
        if let InitialGuess::Gaussian { amplitude, width } = self.guess {
            if !(amplitude > T::zero() && width > T::zero()) {
                return invalid("Gaussian seed needs positive amplitude and width");
            }
        }
        if let Some(g) = self.grid.gamma {
            if !(g >= T::one() && g.is_finite()) {
                return invalid(format!("grading exponent {g} must be at least 1"));
            }
        }
        if let Some(r) = self.grid.radius {
            if !(r > T::zero() && r.is_finite()) {
                return invalid(format!("grid radius {r} must be positive"));
            }
        }
        Ok(())
    }
}
