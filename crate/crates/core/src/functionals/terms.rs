use crate::error::{invalid, Error, Result};
use crate::functionals::FunctionalCoefficients;
use crate::radial::RadialField;
use crate::riesz::{abs_pow, RieszOperator};
use crate::scalar::Scalar;

/// The four integrals every functional is built from.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Terms<T> {
    /// ‖∇u‖₂².
    pub grad2: T,
    /// ‖u‖₂².
    pub mass: T,
    /// D_p(u).
    pub dpp: T,
    /// ‖u‖_q^q.
    pub lq: T,
}

impl<T: Scalar> Terms<T> {
    /// ½a_g G + ½a_m M − (a_c/2p)D − (a_p/q)Q.
    pub fn action(&self, c: &FunctionalCoefficients<T>, p: T, q: T) -> T {
        let half = T::of(0.5);
        half * c.a_grad * self.grad2 + half * c.a_mass * self.mass
            - c.a_choq / (T::of(2.0) * p) * self.dpp
            - c.a_pow / q * self.lq
    }

    /// A = a_g G + a_m M.
    pub fn quadratic(&self, c: &FunctionalCoefficients<T>) -> T {
        c.a_grad * self.grad2 + c.a_mass * self.mass
    }

    /// ⟨I′(u), u⟩ = A − a_c D − a_p Q.
    pub fn nehari(&self, c: &FunctionalCoefficients<T>) -> T {
        self.quadratic(c) - c.a_choq * self.dpp - c.a_pow * self.lq
    }

    /// |⟨I′(u), u⟩| / A.
    pub fn nehari_relative(&self, c: &FunctionalCoefficients<T>) -> T {
        let a = self.quadratic(c);
        if a == T::zero() {
            T::zero()
        } else {
            self.nehari(c).abs() / a
        }
    }

    /// ((N−2)/2)a_g G + (N/2)a_m M − ((N+α)/2p)a_c D − (N/q)a_p Q.
    pub fn pohozaev(&self, c: &FunctionalCoefficients<T>, n: usize, alpha: T, p: T, q: T) -> T {
        let nf = T::of_usize(n);
        let two = T::of(2.0);
        (nf - two) / two * c.a_grad * self.grad2 + nf / two * c.a_mass * self.mass
            - (nf + alpha) / (two * p) * c.a_choq * self.dpp
            - nf / q * c.a_pow * self.lq
    }

    /// The terms of t·u.
    pub fn scaled(&self, t: T, p: T, q: T) -> Self {
        let t2 = t * t;
        Self { grad2: t2 * self.grad2, mass: t2 * self.mass, dpp: t.powf(T::of(2.0) * p) * self.dpp, lq: t.powf(q) * self.lq }
    }
}

/// A field together with its Riesz potential and integrals, so that the
/// action, residual and projections share one matrix-vector product.
#[derive(Clone, Debug)]
pub struct Evaluation<T: Scalar> {
    pub terms: Terms<T>,
    /// I_α∗|u|^p at the nodes, empty when no operator was supplied.
    pub potential: Vec<T>,
}

impl<T: Scalar> Evaluation<T> {
    /// Without an operator the Choquard integral is reported as zero.
    pub fn new(u: &RadialField<T>, op: Option<&RieszOperator<T>>, p: T, q: T) -> Result<Self> {
        let (potential, dpp) = match op {
            Some(op) => {
                let up = u.map(|v| abs_pow(v, p));
                let kup = op.apply(&up)?;
                let d = u.grid().integrate(&kup.values().iter().zip(up.values()).map(|(&a, &b)| a * b).collect::<Vec<_>>());
                (kup.into_values(), d)
            }
            None => (Vec::new(), T::zero()),
        };
        let terms = Terms { grad2: u.grad_squared(), mass: u.l2_squared(), dpp, lq: u.power_integral(q) };
        Ok(Self { terms, potential })
    }

    /// Strong residual at the nodes and its L² norm relative to
    /// ‖a_g(−Δu) + a_m u‖₂, both over all nodes but the last.
    pub fn residual(&self, u: &RadialField<T>, c: &FunctionalCoefficients<T>, p: T, q: T) -> Result<(Vec<T>, T)> {
        if c.a_choq > T::zero() && self.potential.is_empty() {
            return invalid("Choquard coefficient is positive but no Riesz operator was given");
        }
        let lap = u.laplacian();
        let vals = u.values();
        let n = vals.len();
        let mut res = vec![T::zero(); n];
        let mut lin = vec![T::zero(); n];
        for i in 0..n - 1 {
            let v = vals[i];
            let l = -c.a_grad * lap[i] + c.a_mass * v;
            let mut nl = c.a_pow * signed_pow(v, q - T::one());
            if c.a_choq > T::zero() {
                nl += c.a_choq * self.potential[i] * signed_pow(v, p - T::one());
            }
            lin[i] = l * l;
            res[i] = l - nl;
        }
        let grid = u.grid();
        let num = grid.integrate(&res.iter().map(|&r| r * r).collect::<Vec<_>>());
        let den = grid.integrate(&lin);
        let rel = if den == T::zero() { num.sqrt() } else { (num / den).sqrt() };
        Ok((res, rel))
    }
}

/// |v|^{s−1}·sign(v), the sign-preserving power |v|^{s−2}v.
#[inline]
pub(crate) fn signed_pow<T: Scalar>(v: T, s: T) -> T {
    let a = abs_pow(v, s);
    if v < T::zero() {
        -a
    } else {
        a
    }
}

fn check_op<T: Scalar>(u: &RadialField<T>, op: Option<&RieszOperator<T>>, c: &FunctionalCoefficients<T>) -> Result<()> {
    if !c.is_valid() {
        return invalid(format!("functional coefficients must be finite and non-negative: {c:?}"));
    }
    match op {
        Some(op) if !(op.grid().same_as(u.grid())) => Err(Error::GridMismatch("field is not on the operator grid".into())),
        None if c.a_choq > T::zero() => invalid("Choquard coefficient is positive but no Riesz operator was given"),
        _ => Ok(()),
    }
}

/// Value of the generalized functional at `u`.
pub fn action<T: Scalar>(
    u: &RadialField<T>,
    op: Option<&RieszOperator<T>>,
    c: &FunctionalCoefficients<T>,
    p: T,
    q: T,
) -> Result<T> {
    check_op(u, op, c)?;
    let op = if c.a_choq > T::zero() { op } else { None };
    Ok(Evaluation::new(u, op, p, q)?.terms.action(c, p, q))
}

/// Strong-form Euler–Lagrange residual (zero at the Dirichlet node) and its
/// relative L² norm.
pub fn el_residual<T: Scalar>(
    u: &RadialField<T>,
    op: Option<&RieszOperator<T>>,
    c: &FunctionalCoefficients<T>,
    p: T,
    q: T,
) -> Result<(RadialField<T>, T)> {
    check_op(u, op, c)?;
    let op = if c.a_choq > T::zero() { op } else { None };
    let ev = Evaluation::new(u, op, p, q)?;
    let (res, rel) = ev.residual(u, c, p, q)?;
    Ok((u.with_values(res)?, rel))
}

fn alpha_of<T: Scalar>(op: Option<&RieszOperator<T>>) -> T {
    op.map(|o| o.alpha()).unwrap_or_else(T::zero)
}

/// Pohozaev functional P(u).
pub fn pohozaev<T: Scalar>(
    u: &RadialField<T>,
    op: Option<&RieszOperator<T>>,
    c: &FunctionalCoefficients<T>,
    p: T,
    q: T,
) -> Result<T> {
    check_op(u, op, c)?;
    let op = if c.a_choq > T::zero() { op } else { None };
    let terms = Evaluation::new(u, op, p, q)?.terms;
    Ok(terms.pohozaev(c, u.grid().dim(), alpha_of(op), p, q))
}

/// |P(u)| / (a_g‖∇u‖₂² + a_m‖u‖₂²).
pub fn pohozaev_relative<T: Scalar>(terms: &Terms<T>, c: &FunctionalCoefficients<T>, n: usize, alpha: T, p: T, q: T) -> T {
    let a = terms.quadratic(c);
    let pz = terms.pohozaev(c, n, alpha, p, q).abs();
    if a == T::zero() {
        pz
    } else {
        pz / a
    }
}

const T_MIN: f64 = 1e-8;
const T_MAX: f64 = 1e8;

/// The unique t > 0 with A t² = C t^{2p} + D t^q, written in x = ln t where
/// C e^{(2p−2)x} + D e^{(q−2)x} − A is increasing and convex. Newton started
/// to the right of the root decreases monotonically onto it.
pub fn nehari_scale<T: Scalar>(a: T, c: T, d: T, p: T, q: T) -> Result<T> {
    if !(a > T::zero() && a.is_finite()) {
        return Err(Error::NoProjection(format!("quadratic part A = {a} must be positive")));
    }
    if !(c >= T::zero() && d >= T::zero()) || c + d <= T::zero() {
        return Err(Error::NoProjection(format!("nonlinear parts C = {c}, D = {d} must be non-negative with C + D > 0")));
    }
    let two = T::of(2.0);
    let (ec, ed) = (two * p - two, q - two);
    let single = |k: T, e: T| if k > T::zero() { (a / k).ln() / e } else { T::infinity() };
    let mut x = single(c, ec).min(single(d, ed));
    let phi = |x: T| (c * (ec * x).exp() + d * (ed * x).exp() - a, c * ec * (ec * x).exp() + d * ed * (ed * x).exp());
    let tol = T::epsilon() * T::of(4.0);
    for _ in 0..200 {
        let (f, df) = phi(x);
        if !(df > T::zero()) {
            break;
        }
        let step = f / df;
        x -= step;
        if step.abs() <= tol * x.abs().max(T::one()) {
            break;
        }
    }
    let t = x.exp();
    if !(t >= T::of(T_MIN) && t <= T::of(T_MAX)) {
        return Err(Error::NoProjection(format!("Nehari scale t = {t} outside [{T_MIN}, {T_MAX}]")));
    }
    Ok(t)
}

/// Projects `u` onto the Nehari manifold along the ray t·u.
pub fn nehari_project<T: Scalar>(
    u: &RadialField<T>,
    op: Option<&RieszOperator<T>>,
    c: &FunctionalCoefficients<T>,
    p: T,
    q: T,
) -> Result<(T, RadialField<T>)> {
    check_op(u, op, c)?;
    let op = if c.a_choq > T::zero() { op } else { None };
    let terms = Evaluation::new(u, op, p, q)?.terms;
    let t = nehari_scale(terms.quadratic(c), c.a_choq * terms.dpp, c.a_pow * terms.lq, p, q)?;
    Ok((t, u.scale(t)))
}

/// Value of the functional along u_t(x) = u(x/t), in closed form.
pub fn dilation_path<T: Scalar>(terms: &Terms<T>, c: &FunctionalCoefficients<T>, n: usize, alpha: T, p: T, q: T, t: T) -> T {
    let nf = T::of_usize(n);
    let two = T::of(2.0);
    let moved = Terms {
        grad2: t.powf(nf - two) * terms.grad2,
        mass: t.powf(nf) * terms.mass,
        dpp: t.powf(nf + alpha) * terms.dpp,
        lq: t.powf(nf) * terms.lq,
    };
    moved.action(c, p, q)
}

/// Maximizer t* of the dilation path and the maximal value.
///
/// With τ = t², t^{3−N}·d/dt of the path is c₀ + c₁τ − c₂τ^{(α+2)/2}, which
/// is positive then negative on (0, ∞) whenever the path is bounded above.
pub fn dilation_max<T: Scalar>(
    u: &RadialField<T>,
    op: Option<&RieszOperator<T>>,
    c: &FunctionalCoefficients<T>,
    p: T,
    q: T,
) -> Result<(T, T)> {
    check_op(u, op, c)?;
    let op = if c.a_choq > T::zero() { op } else { None };
    let terms = Evaluation::new(u, op, p, q)?.terms;
    let n = u.grid().dim();
    let alpha = alpha_of(op);
    let t = dilation_root(&terms, c, n, alpha, p, q)?;
    Ok((t, dilation_path(&terms, c, n, alpha, p, q, t)))
}

/// Minimum of the functional along the curve t ↦ a(t)·u(x/t) inside the
/// Nehari manifold, a(t) being the Nehari scale of u(x/t).
///
/// By the envelope theorem the t-derivative of the value is the Pohozaev
/// functional of a(t)·u(·/t); its sign change from negative to positive is
/// bracketed outward from t = 1 and bisected. Returns (t*, a(t*), value).
pub fn nehari_dilation_min<T: Scalar>(
    terms: &Terms<T>,
    c: &FunctionalCoefficients<T>,
    n: usize,
    alpha: T,
    p: T,
    q: T,
) -> Result<(T, T, T)> {
    let nf = T::of_usize(n);
    let two = T::of(2.0);
    let at = |x: T| -> Result<(Terms<T>, T)> {
        let t = x.exp();
        let moved = Terms {
            grad2: t.powf(nf - two) * terms.grad2,
            mass: t.powf(nf) * terms.mass,
            dpp: t.powf(nf + alpha) * terms.dpp,
            lq: t.powf(nf) * terms.lq,
        };
        let a = nehari_scale(moved.quadratic(c), c.a_choq * moved.dpp, c.a_pow * moved.lq, p, q)?;
        Ok((moved.scaled(a, p, q), a))
    };
    let slope = |x: T| -> Result<T> { Ok(at(x)?.0.pohozaev(c, n, alpha, p, q)) };
    let limit = T::of(T_MAX.ln());
    let g0 = slope(T::zero())?;
    let (mut lo, mut hi) = (T::zero(), T::zero());
    let mut h = T::of(0.25);
    loop {
        if g0 <= T::zero() {
            hi += h;
            if slope(hi)? > T::zero() {
                break;
            }
            lo = hi;
        } else {
            lo -= h;
            if slope(lo)? < T::zero() {
                break;
            }
            hi = lo;
        }
        h *= two;
        if h > limit {
            return Err(Error::Bracket(format!("no minimum along the Nehari dilation curve for t ∈ [{T_MIN}, {T_MAX}]")));
        }
    }
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if hi - lo <= T::epsilon() * T::of(4.0) || mid == lo || mid == hi {
            break;
        }
        if slope(mid)? <= T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = (lo + hi) / two;
    let (scaled, a) = at(x)?;
    Ok((x.exp(), a, scaled.action(c, p, q)))
}

fn dilation_root<T: Scalar>(terms: &Terms<T>, c: &FunctionalCoefficients<T>, n: usize, alpha: T, p: T, q: T) -> Result<T> {
    let nf = T::of_usize(n);
    let two = T::of(2.0);
    let c0 = (nf - two) / two * c.a_grad * terms.grad2;
    let c1 = nf / two * (c.a_mass * terms.mass - two * c.a_pow * terms.lq / q);
    let c2 = (nf + alpha) / (two * p) * c.a_choq * terms.dpp;
    let e = (alpha + two) / two;
    if c2 == T::zero() {
        if c1 >= T::zero() {
            return Err(Error::Unbounded);
        }
        if c0 == T::zero() {
            return Err(Error::Bracket("dilation path has no interior maximum".into()));
        }
        return Ok((-c0 / c1).sqrt());
    }
    let phi = |y: T| {
        // y = ln τ
        let tau = y.exp();
        let te = (e * y).exp();
        (c0 + c1 * tau - c2 * te, c1 * tau - c2 * e * te)
    };
    let (mut lo, mut hi) = (T::of(2.0 * T_MIN.ln()), T::of(2.0 * T_MAX.ln()));
    if !(phi(lo).0 > T::zero() && phi(hi).0 < T::zero()) {
        return Err(Error::Bracket(format!("dilation maximizer outside t ∈ [{T_MIN}, {T_MAX}]")));
    }
    // safeguarded Newton on ln τ
    let mut y = (lo + hi) / two;
    for _ in 0..300 {
        let (f, df) = phi(y);
        if f > T::zero() {
            lo = y;
        } else {
            hi = y;
        }
        let mut next = if df != T::zero() { y - f / df } else { (lo + hi) / two };
        if !(next > lo && next < hi) {
            next = (lo + hi) / two;
        }
        let done = (next - y).abs() <= T::epsilon() * T::of(4.0) * y.abs().max(T::one());
        y = next;
        if done || hi - lo <= T::epsilon() * T::of(4.0) * y.abs().max(T::one()) {
            break;
        }
    }
    Ok((y / two).exp())
}

/// The quotients τ₁ = ‖u‖₂²/D_p, τ₂ = ‖∇u‖₂²/D_p, τ₃ = ‖∇u‖₂²/‖u‖_{2*}^{2*}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quotient {
    Tau1,
    Tau2,
    Tau3,
}

pub fn tau<T: Scalar>(u: &RadialField<T>, op: Option<&RieszOperator<T>>, kind: Quotient, p: T) -> Result<T> {
    let (num, den) = match kind {
        Quotient::Tau1 | Quotient::Tau2 => {
            let op = op.ok_or_else(|| Error::InvalidParameter("τ₁ and τ₂ need a Riesz operator".into()))?;
            let d = op.choquard_energy(u, p)?;
            let num = if kind == Quotient::Tau1 { u.l2_squared() } else { u.grad_squared() };
            (num, d)
        }
        Quotient::Tau3 => {
            let n = T::of_usize(u.grid().dim());
            let star = T::of(2.0) * n / (n - T::of(2.0));
            (u.grad_squared(), u.power_integral(star))
        }
    };
    if !(den > T::zero()) {
        return invalid(format!("{kind:?} has a vanishing denominator"));
    }
    Ok(num / den)
}

/// One CSV row of identity diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics<T> {
    pub action: T,
    pub pohozaev: T,
    pub pohozaev_relative: T,
    pub nehari_relative: T,
    pub el_relative: T,
    pub tau1: Option<T>,
    pub tau2: Option<T>,
    pub tau3: T,
}

impl<T: Scalar> Diagnostics<T> {
    pub const HEADER: &'static str = "action,pohozaev,pohozaev_rel,nehari_rel,el_rel,tau1,tau2,tau3";

    pub fn compute(
        u: &RadialField<T>,
        op: Option<&RieszOperator<T>>,
        c: &FunctionalCoefficients<T>,
        p: T,
        q: T,
    ) -> Result<Self> {
        check_op(u, op, c)?;
        let ev = Evaluation::new(u, op, p, q)?;
        let (_, el) = ev.residual(u, c, p, q)?;
        let n = u.grid().dim();
        let alpha = alpha_of(op);
        let t = &ev.terms;
        let ratio = |a: T| if t.dpp > T::zero() { Some(a / t.dpp) } else { None };
        Ok(Self {
            action: t.action(c, p, q),
            pohozaev: t.pohozaev(c, n, alpha, p, q),
            pohozaev_relative: pohozaev_relative(t, c, n, alpha, p, q),
            nehari_relative: t.nehari_relative(c),
            el_relative: el,
            tau1: ratio(t.mass),
            tau2: ratio(t.grad2),
            tau3: tau(u, None, Quotient::Tau3, p)?,
        })
    }

    /// Values in [`Self::HEADER`] order; undefined quotients are written as `nan`.
    pub fn csv_row(&self) -> String {
        let f = |x: T| crate::radial::io::fmt17(x.as_f64());
        let o = |x: Option<T>| x.map(f).unwrap_or_else(|| "nan".into());
        [
            f(self.action),
            f(self.pohozaev),
            f(self.pohozaev_relative),
            f(self.nehari_relative),
            f(self.el_relative),
            o(self.tau1),
            o(self.tau2),
            f(self.tau3),
        ]
        .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn setup(n: usize, r: f64, m: usize, alpha: f64) -> (Arc<RadialGrid<f64>>, RieszOperator<f64>) {
        let g = Arc::new(RadialGrid::new(n, r, m, 2.0).unwrap());
        let op = RieszOperator::build(Arc::clone(&g), alpha).unwrap();
        (g, op)
    }

    fn gaussian(g: &Arc<RadialGrid<f64>>) -> RadialField<f64> {
        RadialField::from_fn(Arc::clone(g), |r| (-r * r / 2.0).exp()).unwrap()
    }

    #[test]
    fn zero_field() {
        let (g, op) = setup(3, 10.0, 100, 2.0);
        let u = RadialField::zeros(g);
        let c = FunctionalCoefficients::action(1.0);
        assert_eq!(action(&u, Some(&op), &c, 2.0, 4.0).unwrap(), 0.0);
        assert_eq!(pohozaev(&u, Some(&op), &c, 2.0, 4.0).unwrap(), 0.0);
        let (r, rel) = el_residual(&u, Some(&op), &c, 2.0, 4.0).unwrap();
        assert!(r.values().iter().all(|&x| x == 0.0));
        assert_eq!(rel, 0.0);
        assert!(matches!(nehari_project(&u, Some(&op), &c, 2.0, 4.0), Err(Error::NoProjection(_))));
    }

    #[test]
    fn energy_of_small_constant_is_negative() {
        let (g, op) = setup(3, 2.0, 200, 2.0);
        let u = RadialField::from_fn(g, |_| 1e-2).unwrap();
        let e = action(&u, Some(&op), &FunctionalCoefficients::energy(), 2.0, 4.0).unwrap();
        assert!(e < 0.0);
    }

    #[test]
    fn gaussian_action_term_by_term() {
        let (g, op) = setup(3, 30.0, 2000, 2.0);
        let u = gaussian(&g);
        let pi32 = PI.powf(1.5);
        // G, M, Q and D for e^{−r²/2}; D uses the erf form of the Newton potential of e^{−r²}
        let (gr, m, q, d) = (1.5 * pi32, pi32, (PI / 2.0).powf(1.5), pi32 / (2.0 * 2f64.sqrt()));
        let exact = 0.5 * gr + 0.5 * m - d / 4.0 - q / 4.0;
        let val = action(&u, Some(&op), &FunctionalCoefficients::action(1.0), 2.0, 4.0).unwrap();
        assert_relative_eq!(val, exact, max_relative = 1e-8);
    }

    #[test]
    fn nehari_scale_closed_forms() {
        assert_relative_eq!(nehari_scale(2.0, 1.0, 1.0, 2.0, 4.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(nehari_scale(3.0, 0.0, 2.0, 2.0, 3.5).unwrap(), 1.5f64.powf(1.0 / 1.5), max_relative = 1e-14);
        assert_relative_eq!(nehari_scale(3.0, 2.0, 0.0, 1.7, 3.5).unwrap(), 1.5f64.powf(1.0 / 1.4), max_relative = 1e-14);
        assert!(nehari_scale(1.0, 0.0, 0.0, 2.0, 4.0).is_err());
        assert!(nehari_scale(1e40, 1.0, 1.0, 2.0, 4.0).is_err());
    }

    #[test]
    fn projection_lands_on_manifold() {
        let (g, op) = setup(3, 20.0, 400, 2.0);
        let u = gaussian(&g).scale(0.3);
        let c = FunctionalCoefficients::action(0.7);
        let (t, tu) = nehari_project(&u, Some(&op), &c, 2.0, 4.0).unwrap();
        assert!(t > 1.0);
        let terms = Evaluation::new(&tu, Some(&op), 2.0, 4.0).unwrap().terms;
        assert!(terms.nehari_relative(&c) < 1e-12);
    }

    #[test]
    fn dilation_maximizer_zeroes_pohozaev() {
        let (g, op) = setup(3, 30.0, 800, 2.0);
        let u = RadialField::from_fn(g, |r| 1.3 * (-r * r / 3.0).exp()).unwrap();
        let c = FunctionalCoefficients::action(1.0);
        let (t, value) = dilation_max(&u, Some(&op), &c, 2.0, 4.0).unwrap();
        let ut = u.dilate(t).unwrap();
        let opt = op.for_grid(ut.grid()).unwrap();
        let pz = pohozaev(&ut, Some(&opt), &c, 2.0, 4.0).unwrap();
        let scale = Evaluation::new(&ut, Some(&opt), 2.0, 4.0).unwrap().terms.quadratic(&c);
        assert!(pz.abs() < 1e-10 * scale, "P = {pz}");
        assert_relative_eq!(action(&ut, Some(&opt), &c, 2.0, 4.0).unwrap(), value, max_relative = 1e-12);
        // dense scan oracle
        let terms = Evaluation::new(&u, Some(&op), 2.0, 4.0).unwrap().terms;
        let best = (1..=10_000)
            .map(|k| dilation_path(&terms, &c, 3, 2.0, 2.0, 4.0, 0.01 * k as f64 * t * 0.02 + 1e-3))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best <= value * (1.0 + 1e-12) && best >= value * (1.0 - 1e-6));
    }

    #[test]
    fn pohozaev_is_dilation_derivative() {
        let (g, op) = setup(3, 30.0, 600, 1.5);
        let u = RadialField::from_fn(g, |r| (-r * r / 2.0).exp() * (1.0 + 0.2 * r)).unwrap();
        let c = FunctionalCoefficients::new(1.0, 0.8, 1.2, 0.5);
        let (p, q) = (1.9, 3.4);
        let terms = Evaluation::new(&u, Some(&op), p, q).unwrap().terms;
        let h = 1e-5;
        let fd = (dilation_path(&terms, &c, 3, 1.5, p, q, 1.0 + h) - dilation_path(&terms, &c, 3, 1.5, p, q, 1.0 - h)) / (2.0 * h);
        let pz = pohozaev(&u, Some(&op), &c, p, q).unwrap();
        assert!((fd - pz).abs() < 1e-9 * terms.quadratic(&c));
    }

    #[test]
    fn pure_power_dilation_homogeneity() {
        let g = Arc::new(RadialGrid::new(3, 20.0, 400, 2.0).unwrap());
        let u = gaussian(&g).scale(3.0);
        let c = FunctionalCoefficients::pure_power();
        let q = 4.0;
        let (t1, _) = dilation_max(&u, None, &c, 2.0, q).unwrap();
        let (t2, _) = dilation_max(&u.scale(2.0), None, &c, 2.0, q).unwrap();
        // t*² = (N−2)G / (N(2Q/q − M)) so t*(cu)² = G/(c^{q−2}·2Q/q·N/(N−2) − M·N/(N−2))
        let terms = Evaluation::new(&u, None, 2.0, q).unwrap().terms;
        let expect = |s: f64| (terms.grad2 / (3.0 * (2.0 * s.powf(q - 2.0) * terms.lq / q - terms.mass))).sqrt();
        assert_relative_eq!(t1, expect(1.0), max_relative = 1e-13);
        assert_relative_eq!(t2, expect(2.0), max_relative = 1e-13);
        // small amplitude: the mass term wins and the path is unbounded
        assert!(matches!(dilation_max(&u.scale(0.1), None, &c, 2.0, q), Err(Error::Unbounded)));
    }

    #[test]
    fn gradient_consistency() {
        let (g, op) = setup(3, 20.0, 800, 2.0);
        let u = RadialField::from_fn(Arc::clone(&g), |r| 1.2 * (-r * r / 2.0).exp() * (1.0 + 0.3 * r * r)).unwrap();
        let v = RadialField::from_fn(Arc::clone(&g), |r| (-r * r).exp() * (1.0 - r)).unwrap();
        let c = FunctionalCoefficients::action(1.0);
        let (p, q) = (2.0, 4.0);
        let (res, _) = el_residual(&u, Some(&op), &c, p, q).unwrap();
        let dir: f64 = g.integrate(&res.values().iter().zip(v.values()).map(|(a, b)| a * b).collect::<Vec<_>>());
        let errs: Vec<f64> = [1e-3, 1e-4]
            .iter()
            .map(|&h| {
                let plus = u.with_values(u.values().iter().zip(v.values()).map(|(a, b)| a + h * b).collect()).unwrap();
                let minus = u.with_values(u.values().iter().zip(v.values()).map(|(a, b)| a - h * b).collect()).unwrap();
                let fd = (action(&plus, Some(&op), &c, p, q).unwrap() - action(&minus, Some(&op), &c, p, q).unwrap()) / (2.0 * h);
                (fd - dir).abs()
            })
            .collect();
        assert!(errs[1] < 1e-6 * dir.abs().max(1.0), "{errs:?}");
        assert!(errs[1] <= errs[0]);
    }

    #[test]
    fn lambda_form_matches_rescaled_j() {
        // N = 3, α = 2, p = 5/3, q = 3, λ = 0.1: σ = 4, w(x) = λ^{−3} v(λ^{−2} x)
        let (g, op) = setup(3, 30.0, 600, 2.0);
        let v = RadialField::from_fn(g, |r| (-r * r / 2.0).exp()).unwrap();
        let (p, q, lambda) = (5.0 / 3.0, 3.0, 0.1f64);
        let w = v.power_rescale(lambda.powi(-3), lambda.powi(-2)).unwrap();
        let opw = op.for_grid(w.grid()).unwrap();
        let iv = action(&v, Some(&op), &FunctionalCoefficients::lambda_form(lambda), p, q).unwrap();
        let jw = action(&w, Some(&opw), &FunctionalCoefficients::j_lower(lambda, 4.0), p, q).unwrap();
        assert_relative_eq!(iv, jw, max_relative = 1e-12);
    }

    #[test]
    fn tau_homogeneity() {
        let (g, op) = setup(3, 20.0, 400, 2.0);
        let u = gaussian(&g);
        let p = 2.0;
        let t1 = tau(&u, Some(&op), Quotient::Tau1, p).unwrap();
        let t1c = tau(&u.scale(1.7), Some(&op), Quotient::Tau1, p).unwrap();
        assert_relative_eq!(t1c, 1.7f64.powf(2.0 - 2.0 * p) * t1, max_relative = 1e-12);
        assert!(tau(&RadialField::zeros(g), Some(&op), Quotient::Tau3, p).is_err());
    }

    #[test]
    fn diagnostics_row_shape() {
        let (g, op) = setup(3, 20.0, 200, 2.0);
        let d = Diagnostics::compute(&gaussian(&g), Some(&op), &FunctionalCoefficients::action(1.0), 2.0, 4.0).unwrap();
        assert_eq!(d.csv_row().split(',').count(), Diagnostics::<f64>::HEADER.split(',').count());
    }

    proptest! {
        #[test]
        fn nehari_root_is_unique(a in 1e-3f64..1e3, c in 0.0f64..1e3, d in 0.0f64..1e3,
                                 p in 1.01f64..5.0, q in 2.01f64..6.0) {
            prop_assume!(c + d > 1e-6);
            let g = |t: f64| a - c * t.powf(2.0 * p - 2.0) - d * t.powf(q - 2.0);
            let Ok(t) = nehari_scale(a, c, d, p, q) else {
                // refused only when the root leaves the search bracket
                prop_assert!(g(1e8) > 0.0 || g(1e-8) < 0.0);
                return Ok(());
            };
            prop_assert!(g(t).abs() <= 1e-10 * a);
            // exactly one sign change on a log-spaced scan
            let mut changes = 0;
            let mut prev = g(1e-8);
            for k in 1..=400 {
                let x = g(10f64.powf(-8.0 + 16.0 * k as f64 / 400.0));
                if (x > 0.0) != (prev > 0.0) { changes += 1; }
                prev = x;
            }
            prop_assert!(changes <= 1);
        }
    }
}
