use std::cmp::Ordering;
use std::fmt;

use crate::asymptotics::regime::{int, one, to_f64, two, Exact, Family, Rational, RegimeInfo};

/// Observable recorded at each sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observable {
    /// u(0).
    Peak,
    /// M = ‖u‖₂².
    Mass,
    /// ‖∇u‖₂².
    Grad2,
    /// ‖u‖_q^q.
    Lq,
    /// D_p(u).
    Dpp,
    /// E(u).
    Energy,
    /// m, the action of the ground state.
    Action,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::Peak,
        Observable::Mass,
        Observable::Grad2,
        Observable::Lq,
        Observable::Dpp,
        Observable::Energy,
        Observable::Action,
    ];

    /// Column name in `records.csv`.
    pub fn name(self) -> &'static str {
        match self {
            Observable::Peak => "u0",
            Observable::Mass => "mass",
            Observable::Grad2 => "grad2",
            Observable::Lq => "lq",
            Observable::Dpp => "dpp",
            Observable::Energy => "energy",
            Observable::Action => "action",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Direction of the asymptotic limit in the frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Limit {
    Zero,
    Infinity,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Limit::Zero => "eps->0",
            Limit::Infinity => "eps->inf",
        })
    }
}

/// A predicted law obs ∼ ε^value·|ln ε|^log_power.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exponent {
    pub value: Rational,
    pub log_power: Rational,
    /// Where the printed exponent disagrees with the one implied by the
    /// energy law of the same regime, the implied value.
    pub implied: Option<Rational>,
    /// The statement the entry is read from.
    pub source: &'static str,
}

impl Exponent {
    fn new(value: Rational, source: &'static str) -> Self {
        Self { value, log_power: Rational::from_integer(0), implied: None, source }
    }

    fn with_log(mut self, log_power: Rational) -> Self {
        self.log_power = log_power;
        self
    }

    pub fn value_f64(&self) -> f64 {
        to_f64(self.value)
    }

    pub fn log_power_f64(&self) -> f64 {
        to_f64(self.log_power)
    }

    pub fn has_log(&self) -> bool {
        self.log_power != Rational::from_integer(0)
    }
}

/// A table entry: a law or the reason there is none.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prediction {
    Law(Exponent),
    Unpredicted(&'static str),
}

impl Prediction {
    pub fn law(&self) -> Option<&Exponent> {
        match self {
            Prediction::Law(e) => Some(e),
            Prediction::Unpredicted(_) => None,
        }
    }
}

/// Predicted exponents of every observable in one limit.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentTable {
    pub limit: Limit,
    pub entries: Vec<(Observable, Prediction)>,
}

impl ExponentTable {
    pub fn get(&self, obs: Observable) -> Prediction {
        self.entries
            .iter()
            .find(|(o, _)| *o == obs)
            .map(|(_, p)| *p)
            .unwrap_or(Prediction::Unpredicted("observable not tabulated"))
    }

    fn from_laws(limit: Limit, laws: Laws) -> Self {
        let entries = Observable::ALL
            .into_iter()
            .map(|o| {
                let p = match o {
                    Observable::Peak => laws.peak,
                    Observable::Mass => laws.mass,
                    Observable::Grad2 => laws.grad2,
                    Observable::Energy => laws.energy,
                    Observable::Lq | Observable::Dpp | Observable::Action => {
                        Prediction::Unpredicted("no scaling law is stated for this observable")
                    }
                };
                (o, p)
            })
            .collect();
        Self { limit, entries }
    }
}

struct Laws {
    peak: Prediction,
    mass: Prediction,
    grad2: Prediction,
    energy: Prediction,
}

impl Laws {
    fn none(reason: &'static str) -> Self {
        let u = Prediction::Unpredicted(reason);
        Self { peak: u, mass: u, grad2: u, energy: u }
    }
}

fn law(value: Rational, source: &'static str) -> Prediction {
    Prediction::Law(Exponent::new(value, source))
}

fn open(x: Rational, lo: Rational, hi: Rational) -> bool {
    lo < x && x < hi
}

/// Exact exponents predicted for u(0), ‖u‖₂², ‖∇u‖₂² and E(u) as ε → 0 or
/// ε → ∞. Observables without a stated law, and exponent pairs outside
/// every statement, are marked unpredicted.
pub fn predicted_exponents(regime: &RegimeInfo, limit: Limit) -> ExponentTable {
    let e = &regime.exact;
    let laws = match regime.family {
        Some(Family::LowerCritical) => lower_critical(e, regime.q_vs_q1, limit),
        Some(Family::UpperCritical) => upper_critical(e, limit),
        Some(Family::SobolevCritical) => sobolev_critical(e, limit),
        Some(Family::Interior) => interior(e, regime.q_vs_qbar, limit),
        None => Laws::none("exponents outside every stated regime"),
    };
    ExponentTable::from_laws(limit, laws)
}

/// Local-scaling exponents: u(0), M and ‖∇u‖₂² of ε^{1/(q−2)}w(ε^{1/2}x).
fn local(e: &Exact) -> [Rational; 3] {
    let (n, q) = (e.n, e.q);
    [
        one() / (q - two()),
        (int(4) - n * (q - two())) / (two() * (q - two())),
        (two() * n - q * (n - two())) / (two() * (q - two())),
    ]
}

/// Choquard-scaling exponents: u(0), M and ‖∇u‖₂² of
/// ε^{(2+α)/(4(p−1))}w(ε^{1/2}x).
fn choquard(e: &Exact) -> [Rational; 3] {
    let (n, a, p) = (e.n, e.alpha, e.p);
    [
        (two() + a) / (int(4) * (p - one())),
        (two() + a - n * (p - one())) / (two() * (p - one())),
        (n + a - p * (n - two())) / (two() * (p - one())),
    ]
}

/// Exponents of the dilation ε^{N/(2α)}-family at the lower critical p:
/// u(0), M, ‖∇u‖₂² and E.
fn lower_bubble(e: &Exact) -> [Rational; 4] {
    let (n, a, q) = (e.n, e.alpha, e.q);
    let d = a * (int(4) - n * (q - two()));
    [two() * n / d, n / a, n * (two() * n - q * (n - two())) / d, (n + a) / a]
}

fn lower_critical(e: &Exact, q_vs_q1: Ordering, limit: Limit) -> Laws {
    const SRC0: &str = "lower-critical p, eps->0";
    const SRCI: &str = "lower-critical p, eps->inf";
    let [lu, lm, lg] = local(e);
    let [bu, bm, bg, be] = lower_bubble(e);
    // below (and at) q₁ the local scaling governs ε → 0 and the bubble ε → ∞
    let low_side = q_vs_q1 != Ordering::Greater;
    let use_local = match limit {
        Limit::Zero => low_side,
        Limit::Infinity => !low_side,
    };
    let src = if limit == Limit::Zero { SRC0 } else { SRCI };
    let energy = if q_vs_q1 == Ordering::Equal {
        Prediction::Unpredicted("energy law excludes q = 2 + 4a/(N(2+a))")
    } else if use_local {
        law(lg, src)
    } else {
        law(be, src)
    };
    if use_local {
        Laws { peak: law(lu, src), mass: law(lm, src), grad2: law(lg, src), energy }
    } else {
        Laws { peak: law(bu, src), mass: law(bm, src), grad2: law(bg, src), energy }
    }
}

fn upper_critical(e: &Exact, limit: Limit) -> Laws {
    let (n, q) = (e.dim(), e.q);
    let valid = match n {
        3 => open(q, int(4), int(6)),
        4 => open(q, two(), int(4)),
        _ => open(q, two(), e.two_star()),
    };
    if !valid {
        return Laws::none("upper-critical p needs q in (4, 6) when N = 3");
    }
    match limit {
        Limit::Zero => {
            const SRC: &str = "upper-critical p, eps->0";
            let [u, m, g] = local(e);
            Laws { peak: law(u, SRC), mass: law(m, SRC), grad2: law(g, SRC), energy: law(g, SRC) }
        }
        Limit::Infinity => {
            const SRC: &str = "upper-critical p, eps->inf";
            let qm2 = q - two();
            let (peak, mass) = match n {
                3 => (
                    Exponent::new(one() / (two() * (q - int(4))), SRC),
                    Exponent::new(-qm2 / (two() * (q - int(4))), SRC),
                ),
                4 => (
                    Exponent::new(one() / qm2, SRC).with_log(two() / qm2),
                    Exponent::new(-two() / qm2, SRC).with_log(-(int(4) - q) / qm2),
                ),
                _ => (
                    Exponent::new(one() / qm2, SRC),
                    Exponent::new(-int(4) / ((e.n - two()) * qm2), SRC),
                ),
            };
            // ‖∇u‖₂² and E tend to constants fixed by S_α
            Laws {
                peak: Prediction::Law(peak),
                mass: Prediction::Law(mass),
                grad2: law(Rational::from_integer(0), SRC),
                energy: law(Rational::from_integer(0), SRC),
            }
        }
    }
}

fn sobolev_critical(e: &Exact, limit: Limit) -> Laws {
    let (n, a, p) = (e.dim(), e.alpha, e.p);
    match limit {
        Limit::Zero => {
            const SRC: &str = "q = 2*, eps->0";
            let valid = if n == 3 {
                open(p, two() + a, int(3) + a)
            } else {
                open(p, one() + a / (e.n - two()), e.p_upper())
            };
            if !valid {
                return Laws::none("q = 2* law needs p in (1+a/(N-2), (N+a)/(N-2)), or (2+a, 3+a) when N = 3");
            }
            let [u, m, g] = choquard(e);
            Laws { peak: law(u, SRC), mass: law(m, SRC), grad2: law(g, SRC), energy: law(g, SRC) }
        }
        Limit::Infinity => {
            const SRC: &str = "q = 2*, eps->inf";
            let (peak, mass) = match n {
                3 => {
                    if !open(p, two() + a, int(3) + a) {
                        return Laws::none("q = 2* law needs p in (2+a, 3+a) when N = 3");
                    }
                    let d = p - two() - a;
                    (Exponent::new(one() / (int(4) * d), SRC), Exponent::new(-(p - one() - a) / (two() * d), SRC))
                }
                4 => {
                    if !open(p, two().max(one() + a / two()), two() + a / two()) {
                        return Laws::none("q = 2* law needs p in (max(2, 1+a/2), 2+a/2) when N = 4");
                    }
                    let d = two() * p - two() - a;
                    (
                        Exponent::new(one() / d, SRC).with_log(one() / d),
                        Exponent::new(-two() / d, SRC).with_log(-(int(4) + a - two() * p) / d),
                    )
                }
                _ => {
                    if !open(p, one() + a / (e.n - two()), e.p_upper()) {
                        return Laws::none("q = 2* law needs p in (1+a/(N-2), (N+a)/(N-2))");
                    }
                    let d = (e.n - two()) * (p - one()) - a;
                    (Exponent::new((e.n - two()) / (two() * d), SRC), Exponent::new(-two() / d, SRC))
                }
            };
            // ‖∇u‖₂² and E tend to constants fixed by S
            Laws {
                peak: Prediction::Law(peak),
                mass: Prediction::Law(mass),
                grad2: law(Rational::from_integer(0), SRC),
                energy: law(Rational::from_integer(0), SRC),
            }
        }
    }
}

fn interior(e: &Exact, q_vs_qbar: Ordering, limit: Limit) -> Laws {
    let loc = local(e);
    let cho = choquard(e);
    let (src, below, above, printed_grad) = match limit {
        // below q̄ the local scaling governs ε → 0, the Choquard one ε → ∞
        Limit::Zero => ("interior p and q, eps->0", loc, cho, loc[2]),
        Limit::Infinity => ("interior p and q, eps->inf", cho, loc, cho[2]),
    };
    // u(0) and M are stated for q ≤ q̄ and q > q̄
    let side = if q_vs_qbar == Ordering::Greater { above } else { below };
    let (peak, mass) = (law(side[0], src), law(side[1], src));
    if q_vs_qbar == Ordering::Equal {
        let u = Prediction::Unpredicted("no gradient or energy law at q = 2(2p+a)/(2+a)");
        return Laws { peak, mass, grad2: u, energy: u };
    }
    // E carries the exponent of the governing scaling; the printed ‖∇u‖₂²
    // law uses one exponent on both sides of q̄
    let energy_exp = side[2];
    let mut grad = Exponent::new(printed_grad, src);
    if printed_grad != energy_exp {
        grad.implied = Some(energy_exp);
    }
    Laws { peak, mass, grad2: Prediction::Law(grad), energy: law(energy_exp, src) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::regime::classify_regime;
    use crate::functionals::{Formulation, ProblemParams};
    use rand::{Rng, SeedableRng};

    fn table(n: usize, alpha: f64, p: f64, q: f64, limit: Limit) -> ExponentTable {
        let params = ProblemParams::new(n, alpha, p, q, Formulation::Frequency(1.0)).unwrap();
        predicted_exponents(&classify_regime(&params), limit)
    }

    fn value(t: &ExponentTable, o: Observable) -> Rational {
        t.get(o).law().unwrap_or_else(|| panic!("{o} unpredicted")).value
    }

    #[test]
    fn gross_pitaevskii_poisson_exponents() {
        let t = table(3, 2.0, 2.0, 4.0, Limit::Zero);
        assert_eq!(value(&t, Observable::Peak), int(1));
        assert_eq!(value(&t, Observable::Mass), Rational::new(1, 2));
        assert_eq!(value(&t, Observable::Grad2), Rational::new(1, 2));
        assert_eq!(value(&t, Observable::Energy), Rational::new(3, 2));
        assert_eq!(t.get(Observable::Grad2).law().unwrap().implied, Some(Rational::new(3, 2)));
        let t = table(3, 2.0, 2.0, 4.0, Limit::Infinity);
        assert_eq!(value(&t, Observable::Peak), Rational::new(1, 2));
        assert_eq!(value(&t, Observable::Mass), Rational::new(-1, 2));
        assert_eq!(value(&t, Observable::Grad2), Rational::new(3, 2));
        assert_eq!(value(&t, Observable::Energy), Rational::new(1, 2));
        assert!(matches!(t.get(Observable::Dpp), Prediction::Unpredicted(_)));
    }

    #[test]
    fn lower_critical_mass_exponent() {
        let t = table(3, 2.0, 5.0 / 3.0, 2.4, Limit::Zero);
        assert_eq!(value(&t, Observable::Mass), Rational::new(7, 2));
        let t = table(3, 2.0, 5.0 / 3.0, 2.4, Limit::Infinity);
        assert_eq!(value(&t, Observable::Mass), Rational::new(3, 2));
    }

    #[test]
    fn borderline_q_bar_is_unpredicted() {
        let t = table(3, 2.0, 2.0, 3.0, Limit::Zero);
        assert!(t.get(Observable::Peak).law().is_some());
        assert!(matches!(t.get(Observable::Grad2), Prediction::Unpredicted(_)));
        assert!(matches!(t.get(Observable::Energy), Prediction::Unpredicted(_)));
    }

    #[test]
    fn four_dimensional_laws_carry_logs() {
        let t = table(4, 1.0, 2.5, 3.0, Limit::Infinity);
        let m = t.get(Observable::Mass).law().copied().unwrap();
        assert_eq!((m.value, m.log_power), (int(-2), int(-1)));
        let t = table(4, 1.0, 2.25, 4.0, Limit::Infinity);
        let u = t.get(Observable::Peak).law().copied().unwrap();
        assert_eq!((u.value, u.log_power), (Rational::new(2, 3), Rational::new(2, 3)));
    }

    #[test]
    fn three_dimensional_upper_critical_needs_q_above_four() {
        let t = table(3, 1.0, 4.0, 3.0, Limit::Infinity);
        assert!(t.get(Observable::Peak).law().is_none());
        let t = table(3, 1.0, 4.0, 5.0, Limit::Infinity);
        assert_eq!(value(&t, Observable::Peak), Rational::new(1, 2));
    }

    /// The stored rationals reproduce the printed formulas evaluated in
    /// floating point.
    #[test]
    fn table_matches_formulas_on_random_exponents() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(3..=6usize);
            let nf = n as f64;
            let a = rng.gen_range(1..nf as i64 * 4) as f64 / 4.0;
            if a >= nf {
                continue;
            }
            let (pl, pu) = ((nf + a) / nf, (nf + a) / (nf - 2.0));
            let p = pl + (pu - pl) * rng.gen_range(1..8) as f64 / 8.0;
            let two_star = 2.0 * nf / (nf - 2.0);
            let q = 2.0 + (two_star - 2.0) * rng.gen_range(1..8) as f64 / 8.0;
            let q_bar = 2.0 * (2.0 * p + a) / (2.0 + a);
            let t0 = table(n, a, p, q, Limit::Zero);
            let ti = table(n, a, p, q, Limit::Infinity);
            let close = |x: Rational, y: f64| (to_f64(x) - y).abs() < 1e-12 * (1.0 + y.abs());
            let (u_loc, m_loc) = (1.0 / (q - 2.0), (4.0 - nf * (q - 2.0)) / (2.0 * (q - 2.0)));
            let (u_cho, m_cho) = ((2.0 + a) / (4.0 * (p - 1.0)), (2.0 + a - nf * (p - 1.0)) / (2.0 * (p - 1.0)));
            if (q - q_bar).abs() < 1e-9 {
                continue;
            }
            if q < q_bar {
                assert!(close(value(&t0, Observable::Peak), u_loc));
                assert!(close(value(&t0, Observable::Mass), m_loc));
                assert!(close(value(&ti, Observable::Peak), u_cho));
                assert!(close(value(&ti, Observable::Mass), m_cho));
            } else {
                assert!(close(value(&t0, Observable::Peak), u_cho));
                assert!(close(value(&t0, Observable::Mass), m_cho));
                assert!(close(value(&ti, Observable::Peak), u_loc));
                assert!(close(value(&ti, Observable::Mass), m_loc));
            }
            assert!(close(value(&t0, Observable::Grad2), (2.0 * nf - q * (nf - 2.0)) / (2.0 * (q - 2.0))));
            assert!(close(value(&ti, Observable::Grad2), (nf + a - p * (nf - 2.0)) / (2.0 * (p - 1.0))));
        }
    }
}
