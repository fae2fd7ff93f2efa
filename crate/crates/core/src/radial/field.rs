use std::sync::{Arc, OnceLock};

use crate::error::{invalid, Error, Result};
use crate::radial::grid::RadialGrid;
use crate::scalar::Scalar;

/// Norm selector for [`RadialField::norm`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Norm<T> {
    L2,
    /// (∫|f|^s)^{1/s}, s ≥ 1.
    Ls(T),
    GradL2,
    /// (‖∇f‖₂² + ε‖f‖₂²)^{1/2}.
    H1(T),
}

/// A radial function sampled on a [`RadialGrid`].
#[derive(Debug)]
pub struct RadialField<T: Scalar> {
    grid: Arc<RadialGrid<T>>,
    values: Vec<T>,
    deriv: OnceLock<Vec<T>>,
}

impl<T: Scalar> Clone for RadialField<T> {
    fn clone(&self) -> Self {
        Self { grid: Arc::clone(&self.grid), values: self.values.clone(), deriv: self.deriv.clone() }
    }
}

impl<T: Scalar> RadialField<T> {
    pub fn new(grid: Arc<RadialGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite field value at node {i}"));
        }
        Ok(Self { grid, values, deriv: OnceLock::new() })
    }

    pub fn from_fn(grid: Arc<RadialGrid<T>>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid<T>>) -> Self {
        let values = vec![T::zero(); grid.len()];
        Self { grid, values, deriv: OnceLock::new() }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(Arc::clone(&self.grid), values)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let values = self.values.iter().map(|&v| f(v)).collect();
        Self { grid: Arc::clone(&self.grid), values, deriv: OnceLock::new() }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    /// du/ds and d²u/ds² in the grading coordinate.
    fn s_derivatives(&self) -> (Vec<T>, Vec<T>) {
        let h = self.grid.ds();
        let u = &self.values;
        let mut d1 = Vec::with_capacity(u.len());
        let mut d2 = Vec::with_capacity(u.len());
        for st in self.grid.stencils() {
            let mut a = T::zero();
            let mut b = T::zero();
            for k in 0..5 {
                let v = u[st.idx[k]];
                a += st.d1[k] * v;
                b += st.d2[k] * v;
            }
            d1.push(a / h);
            d2.push(b / (h * h));
        }
        (d1, d2)
    }

    /// u′(r_i), computed once and cached.
    pub fn derivative(&self) -> &[T] {
        self.deriv.get_or_init(|| {
            let (d1, _) = self.s_derivatives();
            d1.iter().zip(self.grid.drds()).map(|(&a, &rp)| a / rp).collect()
        })
    }

    /// Radial Laplacian u″ + (N−1)/r·u′ at the nodes.
    pub fn laplacian(&self) -> Vec<T> {
        let (d1, d2) = self.s_derivatives();
        let nm1 = T::of_usize(self.grid.dim() - 1);
        let g = &self.grid;
        (0..self.values.len())
            .map(|i| {
                let rp = g.drds()[i];
                let ur = d1[i] / rp;
                let urr = (d2[i] - d1[i] * g.d2rds2()[i] / rp) / (rp * rp);
                urr + nm1 * ur / g.nodes()[i]
            })
            .collect()
    }

    /// Σ w_i f_i.
    pub fn integral(&self) -> T {
        self.grid.integrate(&self.values)
    }

    /// ∫|f|^s dV.
    pub fn power_integral(&self, s: T) -> T {
        let two = T::of(2.0);
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(&w, &v)| {
                let a = v.abs();
                let p = if s == two {
                    a * a
                } else if a == T::zero() {
                    T::zero()
                } else {
                    a.powf(s)
                };
                w * p
            })
            .sum()
    }

    /// ‖f‖₂².
    pub fn l2_squared(&self) -> T {
        self.power_integral(T::of(2.0))
    }

    /// ‖∇f‖₂².
    pub fn grad_squared(&self) -> T {
        self.grid.weights().iter().zip(self.derivative()).map(|(&w, &d)| w * d * d).sum()
    }

    pub fn norm(&self, kind: Norm<T>) -> Result<T> {
        Ok(match kind {
            Norm::L2 => self.l2_squared().sqrt(),
            Norm::Ls(s) => {
                if !(s.is_finite() && s >= T::one()) {
                    return invalid(format!("Lebesgue exponent {s} must be at least 1"));
                }
                self.power_integral(s).powf(T::one() / s)
            }
            Norm::GradL2 => self.grad_squared().sqrt(),
            Norm::H1(eps) => {
                if !(eps.is_finite() && eps >= T::zero()) {
                    return invalid(format!("H1 mass coefficient {eps} must be non-negative"));
                }
                (self.grad_squared() + eps * self.l2_squared()).sqrt()
            }
        })
    }

    /// Value at the origin, extrapolated as a quadratic in r² from the first
    /// three nodes.
    pub fn peak_value(&self) -> T {
        let r = self.grid.nodes();
        let (x0, x1, x2) = (r[0] * r[0], r[1] * r[1], r[2] * r[2]);
        let u = &self.values;
        let l0 = x1 * x2 / ((x0 - x1) * (x0 - x2));
        let l1 = x0 * x2 / ((x1 - x0) * (x1 - x2));
        let l2 = x0 * x1 / ((x2 - x0) * (x2 - x1));
        l0 * u[0] + l1 * u[1] + l2 * u[2]
    }

    /// Positive and radially nonincreasing up to a relative slack of 1e−8.
    pub fn is_ground_state_candidate(&self) -> bool {
        let slack = T::one() + T::of(1e-8);
        let n = self.values.len();
        // the Dirichlet node at R is exactly zero for solver fields
        let interior = &self.values[..n - 1];
        interior.iter().all(|&v| v > T::zero())
            && self.values.windows(2).all(|w| w[1] <= w[0] * slack)
    }

    /// u_t(x) = u(x/t) by relabeling nodes r_i ↦ t·r_i.
    pub fn dilate(&self, t: T) -> Result<Self> {
        if !(t.is_finite() && t > T::zero()) {
            return invalid(format!("dilation factor t = {t} must be positive"));
        }
        let grid = Arc::new(self.grid.relabel(t)?);
        Self::new(grid, self.values.clone())
    }

    /// w(x) = a·f(b·x), represented on the nodes r_i / b.
    pub fn power_rescale(&self, a: T, b: T) -> Result<Self> {
        if !(a.is_finite() && a > T::zero() && b.is_finite() && b > T::zero()) {
            return invalid(format!("rescaling factors a = {a}, b = {b} must be positive"));
        }
        let grid = if b == T::one() {
            Arc::clone(&self.grid)
        } else {
            Arc::new(self.grid.relabel(T::one() / b)?)
        };
        Self::new(grid, self.values.iter().map(|&v| a * v).collect())
    }

    /// Monotone cubic interpolation onto another grid. Points beyond the last
    /// node are set to zero (the field is treated as truncated there).
    pub fn resample(&self, target: Arc<RadialGrid<T>>) -> Result<Self> {
        if target.dim() != self.grid.dim() {
            return Err(Error::GridMismatch("dimension differs".into()));
        }
        let interp = crate::radial::interp::MonotoneCubic::new(self.grid.nodes(), &self.values, self.peak_value());
        let values = target.nodes().iter().map(|&r| interp.eval(r)).collect();
        Self::new(target, values)
    }
}
