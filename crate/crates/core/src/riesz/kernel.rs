//! Spherical averages of the Riesz kernel.
//!
//! `k_α(r, s)` is the mean of `|r e₁ − s θ|^{−(N−α)}` over unit vectors θ, so
//! that for radial `f`
//! `(I_α∗f)(r) = A_α(N) ω_{N−1} ∫₀^∞ k_α(r, s) f(s) s^{N−1} ds`.

use std::sync::OnceLock;

use crate::special::{gamma, gauss_legendre};

/// How the spherical average is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMethod {
    /// Closed form for N = 3; hypergeometric series or angular quadrature
    /// otherwise.
    Auto,
    /// Gauss–Legendre quadrature in the polar angle for every N.
    Angular,
}

/// `sinh(b y)/b`, continuous at `b = 0`.
fn sinhc(b: f64, y: f64) -> f64 {
    let z = b * y;
    if z.abs() < 1e-4 {
        y * (1.0 + z * z / 6.0 * (1.0 + z * z / 20.0))
    } else {
        z.sinh() / b
    }
}

/// Closed form for N = 3,
/// `((r+s)^{α−1} − |r−s|^{α−1}) / (2rs(α−1))`, rewritten as
/// `M^{β} (1−x²)^{β/2} sinh(β atanh x) / (β r s)` with `β = α−1`,
/// `M = max(r, s)`, `x = min/max`, which is stable for `x → 0` and reduces to
/// the logarithmic kernel at `α = 1`.
pub fn kernel_n3(alpha: f64, r: f64, s: f64) -> f64 {
    let beta = alpha - 1.0;
    let (lo, hi) = if r < s { (r, s) } else { (s, r) };
    let x = lo / hi;
    if x >= 1.0 {
        // r = s: finite only for α > 1
        return if beta > 0.0 { (2.0 * r).powf(beta) / (2.0 * r * r * beta) } else { f64::INFINITY };
    }
    hi.powf(beta) * (1.0 - x * x).powf(0.5 * beta) * sinhc(beta, x.atanh()) / (r * s)
}

/// Hypergeometric series `M^{−(N−α)} ₂F₁((N−α)/2, 1−α/2; N/2; x²)`, used
/// for `x = min/max ≤ 0.6`.
fn kernel_series(n: usize, alpha: f64, r: f64, s: f64) -> f64 {
    let (lo, hi) = if r < s { (r, s) } else { (s, r) };
    let z = (lo / hi).powi(2);
    let a = 0.5 * (n as f64 - alpha);
    let b = 1.0 - 0.5 * alpha;
    let c = 0.5 * n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..400 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    hi.powf(alpha - n as f64) * sum
}

struct AngularRule {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn angular_rule() -> &'static AngularRule {
    static RULE: OnceLock<AngularRule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(24);
        AngularRule { x, w }
    })
}

/// Polar-angle quadrature of the spherical mean with geometric refinement
/// toward θ = 0, where the integrand peaks when `r ≈ s`.
pub fn kernel_angular(n: usize, alpha: f64, r: f64, s: f64) -> f64 {
    let nf = n as f64;
    let a = 0.5 * (nf - alpha);
    let cn = gamma(0.5 * nf) / (std::f64::consts::PI.sqrt() * gamma(0.5 * (nf - 1.0)));
    let d0 = (r - s) * (r - s);
    let rs4 = 4.0 * r * s;
    let f = |t: f64| {
        let h = (0.5 * t).sin();
        (d0 + rs4 * h * h).powf(-a) * t.sin().powi(n as i32 - 2)
    };
    let rule = angular_rule();
    let seg = |lo: f64, hi: f64| {
        let (c, hw) = (0.5 * (hi + lo), 0.5 * (hi - lo));
        rule.x.iter().zip(&rule.w).map(|(x, w)| w * f(c + hw * x)).sum::<f64>() * hw
    };
    // angular width of the near-diagonal peak
    let width = ((r - s).abs() / (r * s).sqrt()).max(1e-300);
    let mut hi = std::f64::consts::PI;
    let mut total = 0.0;
    let mut levels = 0;
    while hi > 0.25 * width && levels < 80 {
        let lo = 0.5 * hi;
        total += seg(lo, hi);
        hi = lo;
        levels += 1;
    }
    total += seg(0.0, hi);
    cn * total
}

/// Spherical average `k_α(r, s)` for `r ≠ s`.
pub fn spherical_kernel(n: usize, alpha: f64, r: f64, s: f64, method: KernelMethod) -> f64 {
    match method {
        KernelMethod::Angular => kernel_angular(n, alpha, r, s),
        KernelMethod::Auto => {
            if n == 3 {
                kernel_n3(alpha, r, s)
            } else if r.min(s) <= 0.6 * r.max(s) {
                kernel_series(n, alpha, r, s)
            } else {
                kernel_angular(n, alpha, r, s)
            }
        }
    }
}

/// Coefficient `c` of the leading singular term `c |r−s|^{α−1} / s^{N−1}` of
/// the spherical average near `r = s` (valid for `α ≠ 1, 3, 5, …`).
pub fn singular_coefficient(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let pi = std::f64::consts::PI;
    pi.powf(0.5 * (nf - 1.0)) * gamma(0.5 * (1.0 - alpha)) / gamma(0.5 * (nf - alpha))
        / crate::special::sphere_area(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn newtonian_kernel_is_inverse_max() {
        for &(r, s) in &[(0.3, 2.0), (5.0, 1.0), (1e-5, 30.0), (0.999, 1.0)] {
            assert_relative_eq!(kernel_n3(2.0, r, s), 1.0 / f64::max(r, s), max_relative = 1e-13);
        }
    }

    #[test]
    fn closed_form_matches_literal_formula() {
        for &alpha in &[0.5, 1.5, 2.5] {
            let (r, s): (f64, f64) = (0.7, 1.9);
            let lit = ((r + s).powf(alpha - 1.0) - (r - s).abs().powf(alpha - 1.0)) / (r * s * (alpha - 1.0) * 2.0);
            assert_relative_eq!(kernel_n3(alpha, r, s), lit, max_relative = 1e-13);
        }
        let (r, s): (f64, f64) = (0.7, 1.9);
        let log = ((r + s) / (r - s).abs()).ln() / (2.0 * r * s);
        assert_relative_eq!(kernel_n3(1.0, r, s), log, max_relative = 1e-14);
    }

    #[test]
    fn series_and_angular_agree_with_closed_form() {
        for &alpha in &[0.4, 1.0, 1.7, 2.0, 2.8] {
            for &(r, s) in &[(0.1, 1.0), (0.55, 1.0), (0.9, 1.0), (1.0, 1.001), (3.0, 0.2), (1e-4, 2.0)] {
                let exact = kernel_n3(alpha, r, s);
                assert_relative_eq!(kernel_angular(3, alpha, r, s), exact, max_relative = 1e-10);
                if r.min(s) <= 0.6 * r.max(s) {
                    assert_relative_eq!(kernel_series(3, alpha, r, s), exact, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn series_and_angular_agree_in_higher_dimensions() {
        for &n in &[4usize, 5, 6] {
            for &alpha in &[0.7, 2.0, 3.5] {
                for &(r, s) in &[(0.2, 1.0), (0.59, 1.0), (2.0, 5.0)] {
                    let a = kernel_series(n, alpha, r, s);
                    let b = kernel_angular(n, alpha, r, s);
                    assert_relative_eq!(a, b, max_relative = 1e-11);
                }
            }
            // α = 2 gives the Newtonian mean value property, max^{2−N}
            assert_relative_eq!(
                spherical_kernel(n, 2.0, 0.9, 1.0, KernelMethod::Auto),
                1.0,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn singular_coefficient_in_three_dimensions() {
        // −|r−s|^{α−1}/(2 r s (α−1)) at r = s = 1
        for &alpha in &[0.5, 1.5, 2.5] {
            assert_relative_eq!(singular_coefficient(3, alpha), -1.0 / (2.0 * (alpha - 1.0)), max_relative = 1e-13);
        }
    }
}
