use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Relative tolerance for recognizing critical exponents given as decimals.
pub const CRITICAL_TOL: f64 = 1e-9;

/// Which member of the problem family is solved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Formulation<T> {
    /// −Δu + εu = (I_α∗|u|^p)|u|^{p−2}u + |u|^{q−2}u.
    Frequency(T),
    /// −Δv + v = (I_α∗|v|^p)|v|^{p−2}v + λ|v|^{q−2}v.
    Lambda(T),
    /// −Δv + v = μ(I_α∗|v|^p)|v|^{p−2}v + |v|^{q−2}v.
    Mu(T),
}

impl<T: Scalar> Formulation<T> {
    pub fn value(&self) -> T {
        match *self {
            Self::Frequency(x) | Self::Lambda(x) | Self::Mu(x) => x,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Frequency(_) => "eps",
            Self::Lambda(_) => "lambda",
            Self::Mu(_) => "mu",
        }
    }

    pub fn with_value(&self, x: T) -> Self {
        match self {
            Self::Frequency(_) => Self::Frequency(x),
            Self::Lambda(_) => Self::Lambda(x),
            Self::Mu(_) => Self::Mu(x),
        }
    }
}

/// Dimension, exponents and formulation of a problem instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemParams<T> {
    pub n: usize,
    pub alpha: T,
    pub p: T,
    pub q: T,
    pub formulation: Formulation<T>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CRITICAL_TOL * b.abs().max(1.0)
}

impl<T: Scalar> ProblemParams<T> {
    /// Validates `N ≥ 3`, `α ∈ (0, N)`, `p ∈ [(N+α)/N, (N+α)/(N−2)]`,
    /// `q ∈ (2, 2N/(N−2)]` and a positive formulation parameter.
    pub fn new(n: usize, alpha: T, p: T, q: T, formulation: Formulation<T>) -> Result<Self> {
        if n < 3 {
            return invalid(format!("dimension N = {n} must be at least 3"));
        }
        let (a, pf, qf) = (alpha.as_f64(), p.as_f64(), q.as_f64());
        let nf = n as f64;
        if !(a.is_finite() && a > 0.0 && a < nf) {
            return invalid(format!("α = {a} must lie in (0, {n})"));
        }
        let (plo, phi) = ((nf + a) / nf, (nf + a) / (nf - 2.0));
        if !(pf.is_finite() && (pf >= plo || close(pf, plo)) && (pf <= phi || close(pf, phi))) {
            return invalid(format!("p = {pf} must lie in [{plo}, {phi}]"));
        }
        let star = 2.0 * nf / (nf - 2.0);
        if !(qf.is_finite() && qf > 2.0 && (qf <= star || close(qf, star))) {
            return invalid(format!("q = {qf} must lie in (2, {star}]"));
        }
        let x = formulation.value().as_f64();
        if !(x.is_finite() && x > 0.0) {
            return invalid(format!("{} = {x} must be positive", formulation.name()));
        }
        Ok(Self { n, alpha, p, q, formulation })
    }

    pub fn with_formulation(&self, formulation: Formulation<T>) -> Result<Self> {
        Self::new(self.n, self.alpha, self.p, self.q, formulation)
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// 2* = 2N/(N−2).
    pub fn two_star(&self) -> T {
        T::of(2.0 * self.nf() / (self.nf() - 2.0))
    }

    /// Lower critical Choquard exponent (N+α)/N.
    pub fn p_lower(&self) -> T {
        T::of((self.nf() + self.alpha.as_f64()) / self.nf())
    }

    /// Upper critical Choquard exponent (N+α)/(N−2).
    pub fn p_upper(&self) -> T {
        T::of((self.nf() + self.alpha.as_f64()) / (self.nf() - 2.0))
    }

    /// q̄ = 2(2p+α)/(2+α).
    pub fn q_bar(&self) -> T {
        let a = self.alpha;
        T::of(2.0) * (T::of(2.0) * self.p + a) / (T::of(2.0) + a)
    }

    /// p₀ = 1 + (2+α)/N.
    pub fn p0(&self) -> T {
        T::one() + (T::of(2.0) + self.alpha) / T::of_usize(self.n)
    }

    /// q₀ = 2 + 4/N.
    pub fn q0(&self) -> T {
        T::of(2.0 + 4.0 / self.nf())
    }

    /// Λ₁ = (q(2+α) − 2(2p+α)) / (4(p−1)).
    pub fn lambda1(&self) -> T {
        let (a, p, q) = (self.alpha, self.p, self.q);
        let two = T::of(2.0);
        (q * (two + a) - two * (two * p + a)) / (T::of(4.0) * (p - T::one()))
    }

    /// Λ₂ = (2(2p+α) − q(2+α)) / (2(q−2)).
    pub fn lambda2(&self) -> T {
        let (a, p, q) = (self.alpha, self.p, self.q);
        let two = T::of(2.0);
        (two * (two * p + a) - q * (two + a)) / (two * (q - two))
    }

    pub fn is_p_lower(&self) -> bool {
        close(self.p.as_f64(), self.p_lower().as_f64())
    }

    pub fn is_p_upper(&self) -> bool {
        close(self.p.as_f64(), self.p_upper().as_f64())
    }

    pub fn is_q_critical(&self) -> bool {
        close(self.q.as_f64(), self.two_star().as_f64())
    }

    /// σ of the rescaled functionals: 4/(4−N(q−2)) at p = (N+α)/N,
    /// (2*−2)/(q−2) at p = (N+α)/(N−2), 2/((N−2)(p−1)−α) at q = 2*.
    pub fn sigma(&self) -> Option<T> {
        let (nf, a, p, q) = (self.nf(), self.alpha.as_f64(), self.p.as_f64(), self.q.as_f64());
        if self.is_p_lower() {
            Some(T::of(4.0 / (4.0 - nf * (q - 2.0))))
        } else if self.is_p_upper() {
            Some(T::of((self.two_star().as_f64() - 2.0) / (q - 2.0)))
        } else if self.is_q_critical() {
            Some(T::of(2.0 / ((nf - 2.0) * (p - 1.0) - a)))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derived_values_gpp() {
        let pp = ProblemParams::new(3, 2.0, 2.0, 4.0, Formulation::Frequency(1.0)).unwrap();
        assert_relative_eq!(pp.two_star(), 6.0);
        assert_relative_eq!(pp.q_bar(), 3.0);
        assert_relative_eq!(pp.p0(), 7.0 / 3.0);
        assert_relative_eq!(pp.q0(), 10.0 / 3.0);
        assert_relative_eq!(pp.lambda1(), 1.0);
        assert_relative_eq!(pp.lambda2(), -1.0);
        assert!(pp.sigma().is_none());
    }

    #[test]
    fn sigma_cases() {
        let lower = ProblemParams::new(3, 2.0, 5.0 / 3.0, 3.0, Formulation::Lambda(0.1)).unwrap();
        assert_relative_eq!(lower.sigma().unwrap(), 4.0);
        let upper = ProblemParams::new(5, 1.0, 2.0, 3.0, Formulation::Lambda(0.1)).unwrap();
        assert_relative_eq!(upper.sigma().unwrap(), (10.0 / 3.0 - 2.0) / 1.0);
        let sob = ProblemParams::new(5, 1.0, 1.5, 10.0 / 3.0, Formulation::Mu(0.1)).unwrap();
        assert_relative_eq!(sob.sigma().unwrap(), 2.0 / (3.0 * 0.5 - 1.0));
    }

    #[test]
    fn range_checks() {
        let f = Formulation::Frequency(1.0);
        assert!(ProblemParams::new(3, 2.0, 2.0, 7.0, f).is_err());
        assert!(ProblemParams::new(3, 2.0, 2.0, 2.0, f).is_err());
        assert!(ProblemParams::new(3, 2.0, 1.5, 4.0, f).is_err());
        assert!(ProblemParams::new(3, 2.0, 5.5, 4.0, f).is_err());
        assert!(ProblemParams::new(3, 3.0, 2.0, 4.0, f).is_err());
        assert!(ProblemParams::new(3, 2.0, 2.0, 4.0, Formulation::Frequency(0.0)).is_err());
        assert!(ProblemParams::new(3, 2.0, 2.0, 6.0 + 1e-6, f).is_err());
        assert!(ProblemParams::new(3, 2.0, 5.0 / 3.0, 6.0, f).is_ok());
    }
}
