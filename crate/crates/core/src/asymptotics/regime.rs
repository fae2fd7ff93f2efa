use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;

use crate::functionals::ProblemParams;
use crate::scalar::Scalar;

/// Exact rational number used for exponents and regime boundaries.
pub type Rational = Ratio<i64>;

/// Continued-fraction approximation of `x`, stopping at the first convergent
/// within 1e−12 relative or when the denominator would exceed 10⁶. Inputs
/// such as 5/3 or 2.4 come back exact.
pub fn rationalize(x: f64) -> Rational {
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            break;
        }
        let frac = y - a as f64;
        if frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    Rational::new(h1, k1)
}

pub(crate) fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// N, α, p, q as exact rationals, with the derived exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exact {
    pub n: Rational,
    pub alpha: Rational,
    pub p: Rational,
    pub q: Rational,
}

impl Exact {
    pub fn of<T: Scalar>(params: &ProblemParams<T>) -> Self {
        Self {
            n: Rational::from_integer(params.n as i64),
            alpha: rationalize(params.alpha.as_f64()),
            p: rationalize(params.p.as_f64()),
            q: rationalize(params.q.as_f64()),
        }
    }

    pub fn dim(&self) -> i64 {
        self.n.to_integer()
    }

    pub fn two_star(&self) -> Rational {
        two() * self.n / (self.n - two())
    }

    pub fn p_lower(&self) -> Rational {
        (self.n + self.alpha) / self.n
    }

    pub fn p_upper(&self) -> Rational {
        (self.n + self.alpha) / (self.n - two())
    }

    /// q̄ = 2(2p+α)/(2+α).
    pub fn q_bar(&self) -> Rational {
        two() * (two() * self.p + self.alpha) / (two() + self.alpha)
    }

    /// p₀ = 1 + (2+α)/N.
    pub fn p0(&self) -> Rational {
        one() + (two() + self.alpha) / self.n
    }

    /// q₀ = 2 + 4/N.
    pub fn q0(&self) -> Rational {
        two() + int(4) / self.n
    }

    /// q₁ = 2 + 4α/(N(2+α)), where the lower-critical scalings switch.
    pub fn q1(&self) -> Rational {
        two() + int(4) * self.alpha / (self.n * (two() + self.alpha))
    }
}

pub(crate) fn int(k: i64) -> Rational {
    Rational::from_integer(k)
}

pub(crate) fn one() -> Rational {
    int(1)
}

pub(crate) fn two() -> Rational {
    int(2)
}

/// Position of p in [(N+α)/N, (N+α)/(N−2)].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PClass {
    Lower,
    Interior,
    Upper,
}

/// Position of q in (2, 2*].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QClass {
    Interior,
    Sobolev,
}

/// Which family of scaling laws applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// p = (N+α)/N, q < 2 + 4/N.
    LowerCritical,
    /// p = (N+α)/(N−2), q < 2*.
    UpperCritical,
    /// q = 2*, p below the upper critical exponent.
    SobolevCritical,
    /// Both exponents strictly inside their ranges.
    Interior,
}

/// Finite limits of the mass map, fixed by a best constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiniteMass {
    /// (2/(N+2))·S_{q₀}^{(N+2)/2}.
    PowerAtQ0,
    /// ((2+α)/(N+2+α))·S_{p₀}^{(N+2+α)/(2+α)}.
    ChoquardAtP0,
}

impl FiniteMass {
    /// The limit value given the computed best constant S_{q₀} or S_{p₀}.
    pub fn value<T: Scalar>(self, n: usize, alpha: T, constant: T) -> T {
        let nf = T::of_usize(n);
        let two = T::of(2.0);
        match self {
            FiniteMass::PowerAtQ0 => two / (nf + two) * constant.powf((nf + two) / two),
            FiniteMass::ChoquardAtP0 => {
                (two + alpha) / (nf + two + alpha) * constant.powf((nf + two + alpha) / (two + alpha))
            }
        }
    }
}

/// Limit of M(ε) = ‖u_ε‖₂² as ε → 0 or ε → ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MassLimit {
    Zero,
    Finite(FiniteMass),
    Infinite,
    /// No statement covers these exponents.
    Unknown,
}

impl fmt::Display for MassLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MassLimit::Zero => write!(f, "0"),
            MassLimit::Finite(FiniteMass::PowerAtQ0) => write!(f, "finite (2/(N+2))S_q0^((N+2)/2)"),
            MassLimit::Finite(FiniteMass::ChoquardAtP0) => write!(f, "finite ((2+a)/(N+2+a))S_p0^((N+2+a)/(2+a))"),
            MassLimit::Infinite => write!(f, "inf"),
            MassLimit::Unknown => write!(f, "unknown"),
        }
    }
}

/// Regime taxonomy of an exponent pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegimeInfo {
    pub exact: Exact,
    pub p_class: PClass,
    pub q_class: QClass,
    pub family: Option<Family>,
    pub q_vs_qbar: Ordering,
    pub p_vs_p0: Ordering,
    pub q_vs_q0: Ordering,
    /// Only meaningful for the lower-critical family.
    pub q_vs_q1: Ordering,
    pub mass_at_zero: MassLimit,
    pub mass_at_infinity: MassLimit,
}

fn inside(x: Rational, lo: Rational, hi: Rational) -> bool {
    lo < x && x < hi
}

/// Classifies (N, α, p, q) and predicts the limits of the mass map.
pub fn classify_regime<T: Scalar>(params: &ProblemParams<T>) -> RegimeInfo {
    let e = Exact::of(params);
    let p_class = if e.p == e.p_lower() {
        PClass::Lower
    } else if e.p == e.p_upper() {
        PClass::Upper
    } else {
        PClass::Interior
    };
    let q_class = if e.q == e.two_star() { QClass::Sobolev } else { QClass::Interior };
    let family = match (p_class, q_class) {
        (PClass::Lower, _) if e.q < e.q0() => Some(Family::LowerCritical),
        (PClass::Lower, _) => None,
        (PClass::Upper, QClass::Interior) => Some(Family::UpperCritical),
        (PClass::Upper, QClass::Sobolev) => None,
        (PClass::Interior, QClass::Sobolev) => Some(Family::SobolevCritical),
        (PClass::Interior, QClass::Interior) => Some(Family::Interior),
    };
    let (mass_at_zero, mass_at_infinity) = mass_limits(&e, family);
    RegimeInfo {
        exact: e,
        p_class,
        q_class,
        family,
        q_vs_qbar: e.q.cmp(&e.q_bar()),
        p_vs_p0: e.p.cmp(&e.p0()),
        q_vs_q0: e.q.cmp(&e.q0()),
        q_vs_q1: e.q.cmp(&e.q1()),
        mass_at_zero,
        mass_at_infinity,
    }
}

fn mass_limits(e: &Exact, family: Option<Family>) -> (MassLimit, MassLimit) {
    use MassLimit::*;
    use Ordering::*;
    let n = e.dim();
    match family {
        Some(Family::LowerCritical) => (Zero, Infinite),
        Some(Family::UpperCritical) => {
            if n >= 4 && e.q < e.q0() {
                (Zero, Zero)
            } else if (n >= 4 && e.q > e.q0()) || (n == 3 && inside(e.q, int(4), int(6))) {
                (Infinite, Zero)
            } else {
                (Unknown, Unknown)
            }
        }
        Some(Family::SobolevCritical) => {
            let lo = one() + e.alpha / (e.n - two());
            if n >= 4 && e.alpha < e.n - two() && inside(e.p, lo, e.p0()) {
                (Zero, Zero)
            } else if (n >= 4 && inside(e.p, lo.max(e.p0()), e.p_upper()))
                || (n == 3 && inside(e.p, two() + e.alpha, int(3) + e.alpha))
            {
                (Infinite, Zero)
            } else {
                (Unknown, Unknown)
            }
        }
        Some(Family::Interior) => {
            let (q, p) = (e.q.cmp(&e.q0()), e.p.cmp(&e.p0()));
            let at_zero = match (q, p) {
                (Less, _) | (_, Less) => Zero,
                (Equal, Greater) => Finite(FiniteMass::PowerAtQ0),
                (Greater, Equal) => Finite(FiniteMass::ChoquardAtP0),
                (Greater, Greater) => Infinite,
                (Equal, Equal) => Unknown,
            };
            let at_infinity = match (q, p) {
                (Greater, _) | (_, Greater) => Zero,
                (Equal, Less) => Finite(FiniteMass::PowerAtQ0),
                (Less, Equal) => Finite(FiniteMass::ChoquardAtP0),
                (Less, Less) => Infinite,
                (Equal, Equal) => Unknown,
            };
            (at_zero, at_infinity)
        }
        None => (Unknown, Unknown),
    }
}
