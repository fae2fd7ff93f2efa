use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::special::{fd_weights, sphere_area};

/// Outer-end correction weights turning the trapezoid rule into a sixth-order
/// Gregory rule; listed from the last node inward.
const GREGORY: [f64; 5] = [95.0 / 288.0, 317.0 / 240.0, 23.0 / 30.0, 793.0 / 720.0, 157.0 / 160.0];

/// Five-point derivative stencil in the grading coordinate.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Stencil<T> {
    pub idx: [usize; 5],
    pub d1: [T; 5],
    pub d2: [T; 5],
}

/// Graded radial grid on (0, R] with volume quadrature weights.
///
/// Nodes are `r_i = R (i/M)^γ`, the image of the uniform grid `s_i = i/M`
/// under `r(s) = R s^γ`. Integrals are computed by the trapezoid rule in `s`
/// applied to `g(r(s)) r(s)^{N−1} r'(s)`, with a Gregory end correction at
/// `s = 1`; the origin end needs none because the integrand vanishes there to
/// high order. Derivatives use fourth-order differences in `s`.
#[derive(Clone, Debug)]
pub struct RadialGrid<T: Scalar> {
    dim: usize,
    m: usize,
    gamma: T,
    radius: T,
    nodes: Vec<T>,
    weights: Vec<T>,
    drds: Vec<T>,
    d2rds2: Vec<T>,
    // r^{N−1}/r' at the midpoints s_{i+1/2}, i = 0..M−1 (index 0 is the origin cell)
    flux: Vec<T>,
    // r^{N−1} r' at the nodes
    density: Vec<T>,
    stencils: Vec<Stencil<T>>,
}

impl<T: Scalar> RadialGrid<T> {
    /// Builds the graded grid `r_i = R (i/M)^γ`, `i = 1..=M`.
    pub fn new(dim: usize, radius: T, m: usize, gamma: T) -> Result<Self> {
        if dim < 3 {
            return invalid(format!("dimension N = {dim} must be at least 3"));
        }
        if !(radius.is_finite() && radius > T::zero()) {
            return invalid(format!("truncation radius R = {radius} must be positive and finite"));
        }
        if m < 16 {
            return invalid(format!("node count M = {m} must be at least 16"));
        }
        if !(gamma.is_finite() && gamma >= T::one()) {
            return invalid(format!("grading exponent {gamma} must be finite and at least 1"));
        }
        let g = gamma.as_f64();
        let r0 = radius.as_f64();
        let mf = m as f64;
        let h = 1.0 / mf;
        let nf = dim as f64;
        let omega = sphere_area(dim);
        let r_of = |s: f64| r0 * s.powf(g);
        let dr_of = |s: f64| r0 * g * s.powf(g - 1.0);
        let d2r_of = |s: f64| if g == 1.0 { 0.0 } else { r0 * g * (g - 1.0) * s.powf(g - 2.0) };

        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let mut drds = Vec::with_capacity(m);
        let mut d2rds2 = Vec::with_capacity(m);
        let mut density = Vec::with_capacity(m);
        for i in 1..=m {
            let s = i as f64 * h;
            let r = if i == m { r0 } else { r_of(s) };
            let from_end = m - i;
            let c = if from_end < GREGORY.len() { GREGORY[from_end] } else { 1.0 };
            // r^{N−1} r' = γ R^N s^{γN−1}
            let rho = g * r0.powf(nf) * s.powf(g * nf - 1.0);
            nodes.push(T::of(r));
            weights.push(T::of(omega * h * c * rho));
            drds.push(T::of(dr_of(s)));
            d2rds2.push(T::of(d2r_of(s)));
            density.push(T::of(rho));
        }
        let flux = (0..m)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                T::of(r_of(s).powf(nf - 1.0) / dr_of(s))
            })
            .collect();
        let stencils = build_stencils(m, g);
        Ok(Self { dim, m, gamma, radius, nodes, weights, drds, d2rds2, flux, density, stencils })
    }

    /// Grid with every node multiplied by `t` (coordinate relabeling).
    pub fn relabel(&self, t: T) -> Result<Self> {
        if !(t.is_finite() && t > T::zero()) {
            return invalid(format!("relabeling factor {t} must be positive"));
        }
        let n = self.dim as i32;
        let tn = t.powi(n);
        let scale = |v: &[T], f: T| v.iter().map(|&x| x * f).collect::<Vec<T>>();
        Ok(Self {
            dim: self.dim,
            m: self.m,
            gamma: self.gamma,
            radius: self.radius * t,
            nodes: scale(&self.nodes, t),
            weights: scale(&self.weights, tn),
            drds: scale(&self.drds, t),
            d2rds2: scale(&self.d2rds2, t),
            flux: scale(&self.flux, t.powi(n - 2)),
            density: scale(&self.density, tn),
            stencils: self.stencils.clone(),
        })
    }

    pub const fn dim(&self) -> usize {
        self.dim
    }

    pub const fn len(&self) -> usize {
        self.m
    }

    pub const fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Uniform spacing of the grading coordinate, 1/M.
    pub fn ds(&self) -> T {
        T::one() / T::of_usize(self.m)
    }

    /// dr/ds at the nodes.
    pub fn drds(&self) -> &[T] {
        &self.drds
    }

    /// |B_R| = ω_{N−1} R^N / N.
    pub fn ball_volume(&self) -> T {
        T::of(sphere_area(self.dim) / self.dim as f64) * self.radius.powi(self.dim as i32)
    }

    /// Two grids are compatible when they share dimension, size, grading and
    /// truncation radius bit for bit.
    pub fn same_as(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.m == other.m
            && self.gamma == other.gamma
            && self.radius == other.radius
    }

    /// Stable 64-bit fingerprint of (N, M, γ, R).
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for b in bytes {
                h ^= u64::from(*b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(&(self.dim as u64).to_le_bytes());
        eat(&(self.m as u64).to_le_bytes());
        eat(&self.gamma.as_f64().to_le_bytes());
        eat(&self.radius.as_f64().to_le_bytes());
        h
    }

    pub(crate) fn stencils(&self) -> &[Stencil<T>] {
        &self.stencils
    }

    pub(crate) fn d2rds2(&self) -> &[T] {
        &self.d2rds2
    }

    /// Σ w_i g_i.
    pub fn integrate(&self, values: &[T]) -> T {
        self.weights.iter().zip(values).map(|(&w, &g)| w * g).sum()
    }

    /// Tridiagonal second-order discretization of −Δ in conservative form at
    /// the nodes, with the symmetric condition at the origin and the
    /// Dirichlet condition u(R) = 0 (the last node is eliminated). Returns
    /// (sub, diag, super) for rows 0..M−1.
    pub fn neg_laplacian_tridiag(&self) -> (Vec<T>, Vec<T>, Vec<T>) {
        let m = self.m;
        let h = self.ds();
        let h2 = h * h;
        let mut lo = vec![T::zero(); m - 1];
        let mut di = vec![T::zero(); m - 1];
        let mut up = vec![T::zero(); m - 1];
        for k in 0..m - 1 {
            let rho = self.density[k];
            // flux[k] sits between node k−1 (or the origin) and node k
            let left = if k == 0 { T::zero() } else { self.flux[k] };
            let right = self.flux[k + 1];
            di[k] = (left + right) / (rho * h2);
            if k > 0 {
                lo[k] = -left / (rho * h2);
            }
            if k + 1 < m - 1 {
                up[k] = -right / (rho * h2);
            }
        }
        (lo, di, up)
    }
}

fn build_stencils<T: Scalar>(m: usize, gamma: f64) -> Vec<Stencil<T>> {
    // u(0) extrapolated from the first two nodes as a quadratic in r:
    // u(0) = (r_2² u_1 − r_1² u_2)/(r_2² − r_1²), r_2/r_1 = 2^γ.
    let rho = 0.5f64.powf(2.0 * gamma);
    let e1 = 1.0 / (1.0 - rho);
    let e2 = -rho / (1.0 - rho);
    let centered = fd_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
    let mut out = Vec::with_capacity(m);
    for i in 1..=m {
        let mut entries: Vec<(usize, f64, f64)> = Vec::with_capacity(6);
        let mut push = |j: usize, a: f64, b: f64| {
            if let Some(e) = entries.iter_mut().find(|e| e.0 == j) {
                e.1 += a;
                e.2 += b;
            } else {
                entries.push((j, a, b));
            }
        };
        if i + 2 <= m {
            for (o, off) in (-2i64..=2).enumerate() {
                let j = i as i64 + off;
                let (a, b) = (centered[1][o], centered[2][o]);
                match j.cmp(&0) {
                    std::cmp::Ordering::Greater => push(j as usize, a, b),
                    std::cmp::Ordering::Equal => {
                        push(1, a * e1, b * e1);
                        push(2, a * e2, b * e2);
                    }
                    // even extension in s
                    std::cmp::Ordering::Less => push((-j) as usize, a, b),
                }
            }
        } else {
            let xs: Vec<f64> = (m - 4..=m).map(|j| j as f64 - i as f64).collect();
            let c = fd_weights(0.0, &xs, 2);
            for (o, j) in (m - 4..=m).enumerate() {
                push(j, c[1][o], c[2][o]);
            }
        }
        let mut st = Stencil { idx: [0; 5], d1: [T::zero(); 5], d2: [T::zero(); 5] };
        for (k, (j, a, b)) in entries.into_iter().enumerate() {
            st.idx[k] = j - 1;
            st.d1[k] = T::of(a);
            st.d2[k] = T::of(b);
        }
        out.push(st);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_volume_uniform_grid() {
        let g = RadialGrid::<f64>::new(3, 1.0, 2000, 1.0).unwrap();
        let v: f64 = g.weights().iter().sum();
        assert_relative_eq!(v, 4.0 * PI / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn four_dimensional_ball_volume() {
        let g = RadialGrid::<f64>::new(4, 2.0, 2000, 2.0).unwrap();
        let v: f64 = g.weights().iter().sum();
        assert_relative_eq!(v, 8.0 * PI * PI, max_relative = 1e-10);
    }

    #[test]
    fn gaussian_integral() {
        let g = RadialGrid::<f64>::new(3, 30.0, 2000, 2.0).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
        assert_relative_eq!(g.integrate(&f), PI.powf(1.5), max_relative = 1e-10);
    }

    #[test]
    fn node_layout() {
        let g = RadialGrid::<f64>::new(3, 30.0, 100, 2.0).unwrap();
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert!(g.nodes()[0] <= 30.0 * (0.01f64).powi(2) * 2.0);
        assert_eq!(*g.nodes().last().unwrap(), 30.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RadialGrid::<f64>::new(2, 1.0, 100, 1.0).is_err());
        assert!(RadialGrid::<f64>::new(3, -1.0, 100, 1.0).is_err());
        assert!(RadialGrid::<f64>::new(3, f64::NAN, 100, 1.0).is_err());
        assert!(RadialGrid::<f64>::new(3, 1.0, 15, 1.0).is_err());
        assert!(RadialGrid::<f64>::new(3, 1.0, 100, 0.5).is_err());
    }

    #[test]
    fn monomials_on_various_grids() {
        for &(n, gam) in &[(3usize, 1.0), (3, 2.0), (4, 1.5), (5, 2.0), (3, 3.0)] {
            let g = RadialGrid::<f64>::new(n, 2.5, 1000, gam).unwrap();
            for k in 0..=2 {
                let f: Vec<f64> = g.nodes().iter().map(|r| r.powi(k)).collect();
                let exact = sphere_area(n) * 2.5f64.powi(n as i32 + k) / (n as f64 + k as f64);
                assert_relative_eq!(g.integrate(&f), exact, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn single_precision_grid() {
        let g = RadialGrid::<f32>::new(3, 1.0, 400, 2.0).unwrap();
        let v: f32 = g.weights().iter().sum();
        assert!((v - 4.0 * std::f32::consts::PI / 3.0).abs() < 1e-5);
    }
}
