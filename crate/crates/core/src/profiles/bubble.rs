use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::functionals::Terms;
use crate::radial::{RadialField, RadialGrid};
use crate::riesz::kernel::{spherical_kernel, KernelMethod};
use crate::riesz::{riesz_constant, RieszOperator};
use crate::scalar::Scalar;
use crate::special::{gauss_legendre, sphere_area};

/// The three explicit limit profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// U₁ = (A/(1+r²))^{N/2}, lower critical Choquard equation.
    U,
    /// V₁ = [N(N−2)]^{(N−2)/4}(1+r²)^{−(N−2)/2}, upper critical Choquard
    /// equation.
    V,
    /// W₁ = [N(N−2)]^{(N−2)/4}(1+r²)^{−(N−2)/2}, Aubin–Talenti bubble.
    W,
}

/// A profile c·(1+r²)^{−e} dilated to ρ^{−e}·c·(1+(r/ρ)²)^{−e} with
/// e = N/2 for U and (N−2)/2 for V, W; the dilation keeps the L²
/// (for U) or Ḣ¹ (for V, W) norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSpec<T> {
    pub kind: ProfileKind,
    pub n: usize,
    pub coefficient: T,
    pub rho: T,
}

impl<T: Scalar> ProfileSpec<T> {
    /// U_ρ with U₁ = (A/(1+r²))^{N/2}.
    pub fn u(n: usize, amplitude: T, rho: T) -> Result<Self> {
        if !(amplitude > T::zero() && amplitude.is_finite()) {
            return invalid(format!("amplitude A = {amplitude} must be positive"));
        }
        Self::checked(ProfileKind::U, n, amplitude.powf(T::of_usize(n) / T::of(2.0)), rho)
    }

    /// V_ρ with the closed-form constant [N(N−2)]^{(N−2)/4}.
    pub fn v(n: usize, rho: T) -> Result<Self> {
        Self::checked(ProfileKind::V, n, talenti(n), rho)
    }

    /// W_ρ, the Aubin–Talenti bubble.
    pub fn w(n: usize, rho: T) -> Result<Self> {
        Self::checked(ProfileKind::W, n, talenti(n), rho)
    }

    fn checked(kind: ProfileKind, n: usize, coefficient: T, rho: T) -> Result<Self> {
        if n < 3 {
            return invalid(format!("dimension N = {n} must be at least 3"));
        }
        if !(rho > T::zero() && rho.is_finite()) {
            return invalid(format!("dilation ρ = {rho} must be positive"));
        }
        Ok(Self { kind, n, coefficient, rho })
    }

    /// Same shape with another constant in front.
    pub fn with_coefficient(self, coefficient: T) -> Self {
        Self { coefficient, ..self }
    }

    /// Same profile at another dilation.
    pub fn with_rho(self, rho: T) -> Self {
        Self { rho, ..self }
    }

    /// The exponent e of (1+r²)^{−e}, which is also the dilation weight.
    pub fn exponent(&self) -> T {
        let n = T::of_usize(self.n);
        match self.kind {
            ProfileKind::U => n / T::of(2.0),
            ProfileKind::V | ProfileKind::W => (n - T::of(2.0)) / T::of(2.0),
        }
    }

    /// c·(ρ/(ρ²+r²))^e.
    pub fn value(&self, r: T) -> T {
        let e = self.exponent();
        self.coefficient * (self.rho / (self.rho * self.rho + r * r)).powf(e)
    }

    /// d/dr of [`Self::value`].
    pub fn derivative(&self, r: T) -> T {
        let e = self.exponent();
        let s = self.rho * self.rho + r * r;
        -T::of(2.0) * e * r * self.coefficient * self.rho.powf(e) * s.powf(-e - T::one())
    }
}

fn talenti<T: Scalar>(n: usize) -> T {
    let nf = T::of_usize(n);
    (nf * (nf - T::of(2.0))).powf((nf - T::of(2.0)) / T::of(4.0))
}

/// The profile sampled on `grid`.
pub fn bubble<T: Scalar>(spec: &ProfileSpec<T>, grid: &Arc<RadialGrid<T>>) -> Result<RadialField<T>> {
    if grid.dim() != spec.n {
        return Err(Error::GridMismatch(format!("profile for N = {} on a grid for N = {}", spec.n, grid.dim())));
    }
    RadialField::from_fn(Arc::clone(grid), |r| spec.value(r))
}

/// ω_{N−1}∫_R^∞ g(s) s^{N−1} ds for algebraically decaying g: s = R/t and
/// Gauss–Legendre on the dyadic pieces t ∈ [2^{−j−1}, 2^{−j}].
pub(crate) fn tail_integral(n: usize, radius: f64, g: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = nodes16();
    let nf = n as f64;
    let mut total = 0.0;
    for j in 0..60 {
        let (a, b) = (0.5f64.powi(j + 1), 0.5f64.powi(j));
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let piece: f64 = x
            .iter()
            .zip(w)
            .map(|(&xi, &wi)| {
                let t = mid + half * xi;
                let s = radius / t;
                wi * half * g(s) * s.powf(nf - 1.0) * radius / (t * t)
            })
            .sum();
        total += piece;
        if j > 8 && piece.abs() <= 1e-17 * total.abs() {
            break;
        }
    }
    sphere_area(n) * total
}

fn nodes16() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(16))
}

/// (I_α∗f)(r) contributed by f restricted to |y| > R.
pub(crate) fn outer_potential(n: usize, alpha: f64, radius: f64, r: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let a = riesz_constant(n, alpha)?;
    Ok(a * tail_integral(n, radius, |s| spherical_kernel(n, alpha, r, s, KernelMethod::Auto) * f(s)))
}

/// ∫|∇P|², ∫P², D_p(P) and ∫|P|^q over R^N for a closed-form profile P:
/// quadrature on the grid plus the part beyond R. For D_p the outer part is
/// the cross term 2∫_{|x|>R}(I_α∗|P|^p 1_{|y|<R})|P|^p; the outer–outer
/// term is of higher order in 1/R and dropped.
pub fn profile_terms<T: Scalar>(
    spec: &ProfileSpec<T>,
    grid: &Arc<RadialGrid<T>>,
    op: Option<&RieszOperator<T>>,
    p: T,
    q: T,
) -> Result<Terms<T>> {
    let field = bubble(spec, grid)?;
    let n = spec.n;
    let radius = grid.radius().as_f64();
    let (pf, qf) = (p.as_f64(), q.as_f64());
    let val = |r: f64| spec.value(T::of(r)).as_f64();
    let der = |r: f64| spec.derivative(T::of(r)).as_f64();
    let nodes = grid.nodes();
    let grad: Vec<T> = nodes.iter().map(|&r| spec.derivative(r).powi(2)).collect();
    let grad2 = grid.integrate(&grad).as_f64() + tail_integral(n, radius, |s| der(s).powi(2));
    let mass = field.l2_squared().as_f64() + tail_integral(n, radius, |s| val(s).powi(2));
    let lq = field.power_integral(q).as_f64() + tail_integral(n, radius, |s| val(s).powf(qf));
    let dpp = match op {
        Some(op) => {
            let inner = op.choquard_energy(&field, p)?.as_f64();
            let up: Vec<T> = field.values().iter().map(|&v| v.powf(p)).collect();
            let cross = tail_integral(n, radius, |s| op.potential_at(&up, T::of(s)).as_f64() * val(s).powf(pf));
            inner + 2.0 * cross
        }
        None => 0.0,
    };
    Ok(Terms { grad2: T::of(grad2), mass: T::of(mass), dpp: T::of(dpp), lq: T::of(lq) })
}

/// A resolved constant and the relative residual of the limit equation it
/// leaves on the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeFit<T> {
    pub value: T,
    /// max over nodes with r ≤ R/4 of the pointwise residual, relative to
    /// the residual scale at the origin.
    pub residual: T,
}

/// Bisection on ln x for the decreasing g(x) = 1 − x^k·h with root at the
/// innermost node.
fn solve_power(k: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Bracket(format!("amplitude equation has no positive root (h = {h})")));
    }
    let g = |y: f64| 1.0 - (k * y).exp() * h;
    let (mut lo, mut hi) = (-200.0 / k, 200.0 / k);
    if !(g(lo) > 0.0 && g(hi) < 0.0) {
        return Err(Error::Bracket("amplitude outside e^{±200/k}".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Potential of |φ|^p on the nodes of the operator grid, with the part of
/// |φ|^p beyond R added.
fn full_potential<T: Scalar>(op: &RieszOperator<T>, phi: &impl Fn(f64) -> f64, p: f64) -> Result<Vec<f64>> {
    let grid = op.grid();
    let (n, alpha, radius) = (grid.dim(), op.alpha().as_f64(), grid.radius().as_f64());
    let fp: Vec<T> = grid.nodes().iter().map(|&r| T::of(phi(r.as_f64()).powf(p))).collect();
    let inner = op.apply_values(&fp);
    grid.nodes()
        .iter()
        .zip(inner)
        .map(|(&r, k)| Ok(k.as_f64() + outer_potential(n, alpha, radius, r.as_f64(), |s| phi(s).powf(p))?))
        .collect()
}

/// Residual of the limit equation the profile belongs to, max over nodes
/// with r ≤ R/4 relative to its scale at the origin:
/// U: U − (I_α∗U^{(N+α)/N})U^{α/N} (needs `op`),
/// V: −ΔV − (I_α∗V^{(N+α)/(N−2)})V^{(2+α)/(N−2)} with the exact Laplacian
/// (needs `op`),
/// W: −Δ_h W − W^{2*−1} with the grid Laplacian.
/// Potentials include the part of the source beyond R.
pub fn profile_residual<T: Scalar>(
    spec: &ProfileSpec<T>,
    grid: &Arc<RadialGrid<T>>,
    op: Option<&RieszOperator<T>>,
) -> Result<T> {
    let field = bubble(spec, grid)?;
    let n = spec.n as f64;
    let val = |r: f64| spec.value(T::of(r)).as_f64();
    let cut = grid.radius().as_f64() / 4.0;
    let rs: Vec<f64> = grid.nodes().iter().map(|r| r.as_f64()).take_while(|&r| r <= cut).collect();
    let op = op.filter(|o| o.grid().same_as(grid));
    let need = || op.ok_or_else(|| Error::GridMismatch("profile residual needs the operator on this grid".into()));
    let worst = |res: &mut dyn Iterator<Item = f64>, scale: f64| res.fold(0.0, |m: f64, x| m.max(x.abs())) / scale;
    let out = match spec.kind {
        ProfileKind::U => {
            let op = need()?;
            let alpha = op.alpha().as_f64();
            let pot = full_potential(op, &val, (n + alpha) / n)?;
            let mut res = rs.iter().zip(&pot).map(|(&r, &k)| val(r) - k * val(r).powf(alpha / n));
            worst(&mut res, val(0.0))
        }
        ProfileKind::V => {
            let op = need()?;
            let alpha = op.alpha().as_f64();
            let pot = full_potential(op, &val, (n + alpha) / (n - 2.0))?;
            let (c, rho) = (spec.coefficient.as_f64(), spec.rho.as_f64());
            let lap = |r: f64| c * n * (n - 2.0) * rho.powf(0.5 * (n - 2.0)) * (rho * rho + r * r).powf(-0.5 * (n + 2.0)) * rho * rho;
            let e = (2.0 + alpha) / (n - 2.0);
            let mut res = rs.iter().zip(&pot).map(|(&r, &k)| lap(r) - k * val(r).powf(e));
            worst(&mut res, lap(0.0))
        }
        ProfileKind::W => {
            let lap = field.laplacian();
            let e = (n + 2.0) / (n - 2.0);
            let mut res = rs.iter().zip(&lap).map(|(&r, &l)| -l.as_f64() - val(r).powf(e));
            worst(&mut res, val(0.0).powf(e))
        }
    };
    Ok(T::of(out))
}

/// The constant A in U₁ = (A/(1+r²))^{N/2} for which U₁ solves
/// U = (I_α∗|U|^{(N+α)/N})|U|^{α/N−2}U. With φ = (1+r²)^{−N/2} the equation
/// reads 1 = A^α (I_α∗φ^{(N+α)/N}) φ^{α/N−1}; its value at the innermost
/// node is solved by bisection and the residual is reported over r ≤ R/4.
pub fn resolve_u_amplitude<T: Scalar>(op: &RieszOperator<T>) -> Result<AmplitudeFit<T>> {
    let grid = op.grid();
    let (n, alpha) = (grid.dim() as f64, op.alpha().as_f64());
    let p = (n + alpha) / n;
    let phi = |r: f64| (1.0 + r * r).powf(-0.5 * n);
    let pot = full_potential(op, &phi, p)?;
    let r0 = grid.nodes()[0].as_f64();
    let a = solve_power(alpha, pot[0] * phi(r0).powf(alpha / n - 1.0))?;
    let scale = phi(r0);
    let cut = grid.radius().as_f64() / 4.0;
    let residual = grid
        .nodes()
        .iter()
        .zip(&pot)
        .take_while(|(r, _)| r.as_f64() <= cut)
        .map(|(&r, &k)| {
            let f = phi(r.as_f64());
            (f - a.powf(alpha) * k * f.powf(alpha / n)).abs() / scale
        })
        .fold(0.0, f64::max);
    Ok(AmplitudeFit { value: T::of(a), residual: T::of(residual) })
}

/// The constant c for which c·(1+r²)^{−(N−2)/2} solves the upper critical
/// equation −ΔV = (I_α∗|V|^{(N+α)/(N−2)})|V|^{(2+α)/(N−2)−1}V. With
/// φ = (1+r²)^{−(N−2)/2} it reads 1 = c^{(4+2α)/(N−2)}(I_α∗φ^p)φ^{(2+α)/(N−2)}/(−Δφ),
/// with −Δφ = N(N−2)(1+r²)^{−(N+2)/2}.
pub fn resolve_v_coefficient<T: Scalar>(op: &RieszOperator<T>) -> Result<AmplitudeFit<T>> {
    let grid = op.grid();
    let (n, alpha) = (grid.dim() as f64, op.alpha().as_f64());
    let p = (n + alpha) / (n - 2.0);
    let e = (2.0 + alpha) / (n - 2.0);
    let phi = |r: f64| (1.0 + r * r).powf(-0.5 * (n - 2.0));
    let pot = full_potential(op, &phi, p)?;
    let lap: Vec<f64> =
        grid.nodes().iter().map(|&r| n * (n - 2.0) * (1.0 + r.as_f64().powi(2)).powf(-0.5 * (n + 2.0))).collect();
    let r0 = grid.nodes()[0].as_f64();
    let c = solve_power((4.0 + 2.0 * alpha) / (n - 2.0), pot[0] * phi(r0).powf(e) / lap[0])?;
    let k = c.powf((4.0 + 2.0 * alpha) / (n - 2.0));
    let cut = grid.radius().as_f64() / 4.0;
    let residual = grid
        .nodes()
        .iter()
        .zip(pot.iter().zip(&lap))
        .take_while(|(r, _)| r.as_f64() <= cut)
        .map(|(&r, (&v, &l))| (l - k * v * phi(r.as_f64()).powf(e)).abs() / lap[0])
        .fold(0.0, f64::max);
    Ok(AmplitudeFit { value: T::of(c), residual: T::of(residual) })
}
