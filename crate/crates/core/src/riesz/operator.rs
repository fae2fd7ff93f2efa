use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::radial::{RadialField, RadialGrid};
use crate::riesz::kernel::{singular_coefficient, spherical_kernel, KernelMethod};
use crate::scalar::Scalar;
use crate::special::{gamma, sphere_area, zeta};

/// Largest kernel the builder will allocate (about 2 GB of `f64`).
const MAX_ENTRIES: usize = 250_000_000;

/// `A_α(N) = Γ((N−α)/2) / (Γ(α/2) π^{N/2} 2^α)`.
pub fn riesz_constant(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(n, alpha)?;
    let nf = n as f64;
    Ok(gamma(0.5 * (nf - alpha)) / (gamma(0.5 * alpha) * std::f64::consts::PI.powf(0.5 * nf) * 2f64.powf(alpha)))
}

/// Sharp diagonal Hardy–Littlewood–Sobolev constant
/// `C_α(N) = π^{(N−α)/2} Γ(α/2)/Γ((N+α)/2) · (Γ(N/2)/Γ(N))^{−α/N}`.
pub fn hls_sharp_constant(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(n, alpha)?;
    let nf = n as f64;
    let pi = std::f64::consts::PI;
    Ok(pi.powf(0.5 * (nf - alpha)) * gamma(0.5 * alpha) / gamma(0.5 * (nf + alpha))
        * (gamma(0.5 * nf) / gamma(nf)).powf(-alpha / nf))
}

fn check_alpha(n: usize, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha < n as f64) {
        return invalid(format!("Riesz order α = {alpha} must lie in (0, {n})"));
    }
    Ok(())
}

/// Dense discretization of `f ↦ I_α∗f` for radial `f`.
///
/// Off-diagonal entries are `A_α w_j k_α(r_i, r_j)`. The diagonal carries the
/// finite part of the kernel plus the zeta-function correction of the
/// trapezoid rule for the `|r−s|^{α−1}` (or logarithmic) singularity, so
/// `w_i K_ij` is symmetric.
#[derive(Clone, Debug)]
pub struct RieszOperator<T: Scalar> {
    grid: Arc<RadialGrid<T>>,
    alpha: T,
    constant: T,
    matrix: Arc<Vec<T>>,
    // multiplier picked up by relabeling the grid
    scale: T,
}

impl<T: Scalar> RieszOperator<T> {
    /// Builds the kernel matrix on `grid`.
    pub fn build(grid: Arc<RadialGrid<T>>, alpha: T) -> Result<Self> {
        Self::build_with(grid, alpha, KernelMethod::Auto)
    }

    pub fn build_with(grid: Arc<RadialGrid<T>>, alpha: T, method: KernelMethod) -> Result<Self> {
        let n = grid.dim();
        let a = alpha.as_f64();
        let constant = riesz_constant(n, a)?;
        let m = grid.len();
        let entries = m.checked_mul(m).filter(|&e| e <= MAX_ENTRIES).ok_or(Error::Memory(m.saturating_mul(m)))?;
        let mut matrix = Vec::new();
        matrix.try_reserve_exact(entries).map_err(|_| Error::Memory(entries))?;
        matrix.resize(entries, T::zero());

        let r: Vec<f64> = grid.nodes().iter().map(|x| x.as_f64()).collect();
        let w: Vec<f64> = grid.weights().iter().map(|x| x.as_f64()).collect();
        for i in 0..m {
            for j in 0..i {
                let k = constant * spherical_kernel(n, a, r[i], r[j], method);
                matrix[i * m + j] = T::of(k * w[j]);
                matrix[j * m + i] = T::of(k * w[i]);
            }
        }
        let diag = diagonal_navot(&grid, a);
        for (i, d) in diag.into_iter().enumerate() {
            matrix[i * m + i] = T::of(constant * d);
        }
        Ok(Self { grid, alpha, constant: T::of(constant), matrix: Arc::new(matrix), scale: T::one() })
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// A_α(N).
    pub fn constant(&self) -> T {
        self.constant
    }

    /// Entry K_ij including any relabeling factor.
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.scale * self.matrix[i * self.grid.len() + j]
    }

    /// Operator on the grid with nodes multiplied by `t`; entries scale by
    /// `t^α`, the matrix itself is shared.
    pub fn relabel(&self, t: T) -> Result<Self> {
        Ok(Self {
            grid: Arc::new(self.grid.relabel(t)?),
            alpha: self.alpha,
            constant: self.constant,
            matrix: Arc::clone(&self.matrix),
            scale: self.scale * t.powf(self.alpha),
        })
    }

    /// Operator for a field living on a relabeled copy of this grid.
    pub fn for_grid(&self, grid: &Arc<RadialGrid<T>>) -> Result<Self> {
        if Arc::ptr_eq(grid, &self.grid) || grid.same_as(&self.grid) {
            return Ok(self.clone());
        }
        let g = &self.grid;
        if grid.dim() != g.dim() || grid.len() != g.len() || grid.gamma() != g.gamma() {
            return Err(Error::GridMismatch("grid is not a relabeling of the operator grid".into()));
        }
        let t = grid.radius() / g.radius();
        let mut op = self.relabel(t)?;
        op.grid = Arc::clone(grid);
        Ok(op)
    }

    fn check_grid(&self, f: &RadialField<T>) -> Result<()> {
        if Arc::ptr_eq(f.grid(), &self.grid) || f.grid().same_as(&self.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("field is not on the operator grid".into()))
        }
    }

    /// (I_α∗f)(r_i) for raw node values.
    pub fn apply_values(&self, f: &[T]) -> Vec<T> {
        let m = self.grid.len();
        self.matrix
            .chunks_exact(m)
            .map(|row| self.scale * row.iter().zip(f).map(|(&k, &v)| k * v).sum::<T>())
            .collect()
    }

    /// (I_α∗f)(r) at an arbitrary radius by the plain product rule over the
    /// nodes; accurate when `r` is not close to a node where `f` is large.
    pub fn potential_at(&self, f: &[T], r: T) -> T {
        let n = self.grid.dim();
        let a = self.alpha.as_f64();
        let rf = r.as_f64();
        let sum: f64 = self
            .grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(f)
            .map(|((&s, &w), &v)| {
                let s = s.as_f64();
                let k = if rf == 0.0 { s.powf(a - n as f64) } else if s == rf { 0.0 } else { spherical_kernel(n, a, rf, s, KernelMethod::Auto) };
                k * w.as_f64() * v.as_f64()
            })
            .sum();
        T::of(self.constant.as_f64() * sum)
    }

    /// I_α∗f as a field on the same grid.
    pub fn apply(&self, f: &RadialField<T>) -> Result<RadialField<T>> {
        self.check_grid(f)?;
        f.with_values(self.apply_values(f.values()))
    }

    /// ⟨f, g⟩_α = ∫ (I_α∗f) g.
    pub fn bilinear(&self, f: &RadialField<T>, g: &RadialField<T>) -> Result<T> {
        self.check_grid(f)?;
        self.check_grid(g)?;
        let kf = self.apply_values(f.values());
        Ok(self.grid.weights().iter().zip(&kf).zip(g.values()).map(|((&w, &a), &b)| w * a * b).sum())
    }

    /// D_p(u) = ∫ (I_α∗|u|^p)|u|^p.
    pub fn choquard_energy(&self, u: &RadialField<T>, p: T) -> Result<T> {
        if !(p.is_finite() && p >= T::one()) {
            return invalid(format!("Choquard exponent p = {p} must be at least 1"));
        }
        let up = u.map(|v| abs_pow(v, p));
        self.bilinear(&up, &up)
    }

    /// Writes the cache file: little-endian header (N as u64, α as f64,
    /// R as f64, M as u64, γ as f64) then the row-major matrix as f64.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let g = &self.grid;
        out.write_all(&(g.dim() as u64).to_le_bytes())?;
        out.write_all(&self.alpha.as_f64().to_le_bytes())?;
        out.write_all(&g.radius().as_f64().to_le_bytes())?;
        out.write_all(&(g.len() as u64).to_le_bytes())?;
        out.write_all(&g.gamma().as_f64().to_le_bytes())?;
        for &k in self.matrix.iter() {
            out.write_all(&(self.scale * k).as_f64().to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Loads a cache file written by [`save`](Self::save) for this grid and α.
    pub fn load(path: &Path, grid: Arc<RadialGrid<T>>, alpha: T) -> Result<Self> {
        let mut input = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut b8 = [0u8; 8];
        let mut next = |inp: &mut dyn Read| -> Result<[u8; 8]> {
            inp.read_exact(&mut b8)?;
            Ok(b8)
        };
        let n = u64::from_le_bytes(next(&mut input)?) as usize;
        let a = f64::from_le_bytes(next(&mut input)?);
        let r = f64::from_le_bytes(next(&mut input)?);
        let m = u64::from_le_bytes(next(&mut input)?) as usize;
        let g = f64::from_le_bytes(next(&mut input)?);
        if n != grid.dim()
            || m != grid.len()
            || a != alpha.as_f64()
            || r != grid.radius().as_f64()
            || g != grid.gamma().as_f64()
        {
            return Err(Error::GridMismatch(format!("cache {} was built for another grid or order", path.display())));
        }
        let mut matrix = Vec::with_capacity(m * m);
        let mut buf = vec![0u8; 8 * m];
        for _ in 0..m {
            input.read_exact(&mut buf)?;
            matrix.extend(buf.chunks_exact(8).map(|c| T::of(f64::from_le_bytes(c.try_into().unwrap()))));
        }
        let constant = T::of(riesz_constant(n, a)?);
        Ok(Self { grid, alpha, constant, matrix: Arc::new(matrix), scale: T::one() })
    }

    /// Cache file name keyed by (N, α, grid hash).
    pub fn cache_name(grid: &RadialGrid<T>, alpha: T) -> PathBuf {
        PathBuf::from(format!("kernel_N{}_a{:.6}_{:016x}.bin", grid.dim(), alpha.as_f64(), grid.hash()))
    }

    /// Loads from `dir` when a matching cache exists, else builds and saves.
    pub fn build_cached(grid: Arc<RadialGrid<T>>, alpha: T, dir: &Path) -> Result<Self> {
        let path = dir.join(Self::cache_name(&grid, alpha));
        if path.exists() {
            if let Ok(op) = Self::load(&path, Arc::clone(&grid), alpha) {
                return Ok(op);
            }
        }
        let op = Self::build(grid, alpha)?;
        std::fs::create_dir_all(dir)?;
        op.save(&path)?;
        Ok(op)
    }
}

/// |v|^{s−1}·v-free magnitude power |v|^s.
#[inline]
pub(crate) fn abs_pow<T: Scalar>(v: T, s: T) -> T {
    let a = v.abs();
    if a == T::zero() {
        T::zero()
    } else if s == T::of(2.0) {
        a * a
    } else {
        a.powf(s)
    }
}

/// Finite part of the spherical average at `r = s = 1` after removing the
/// `|r−s|^{α−1}` term: `(ω_{N−2}/ω_{N−1}) 2^{α−2} B((α−1)/2, (N−1)/2)`,
/// continued analytically below α = 1.
fn regular_part(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let beta = alpha - 1.0;
    let ratio = sphere_area(n - 1) / sphere_area(n);
    ratio * 2f64.powf(alpha - 2.0) * gamma(0.5 * beta) * gamma(0.5 * (nf - 1.0)) / gamma(0.5 * (nf + beta - 1.0))
}

/// Diagonal of `K/A` by the generalized Euler–Maclaurin (Navot) rule for the
/// trapezoid sum with the singular node left out:
/// `w_i [a r^{α−N} − 2ζ(−β) c r^{1−N} (h r')^β]`, `β = α−1`, where `a` is the
/// finite part and `c` the coefficient of `|r−s|^β`. At α = 1 the limit is
/// `w_i r^{1−N} [f − L ln r + L ln(h r'/2π)]` with `L = −ω_{N−2}/ω_{N−1}`.
/// When β is a positive even integer the kernel is smooth up to a
/// `|r−s|^β ln|r−s|` term and only the finite part is kept.
fn diagonal_navot<T: Scalar>(grid: &RadialGrid<T>, alpha: f64) -> Vec<f64> {
    let n = grid.dim();
    let nf = n as f64;
    let beta = alpha - 1.0;
    let h = grid.ds().as_f64();
    let two_pi = 2.0 * std::f64::consts::PI;
    let log_case = beta.abs() < 1e-7;
    let even = beta > 1.0 && (beta / 2.0 - (beta / 2.0).round()).abs() < 1e-7;
    // at α = 1 the finite part is the β → 0 limit of a + c, taken symmetrically
    let fin = if log_case {
        let d = 1e-4;
        let sum = |b: f64| regular_part(n, 1.0 + b) + singular_coefficient(n, 1.0 + b);
        0.5 * (sum(d) + sum(-d))
    } else {
        0.0
    };
    let lead = -sphere_area(n - 1) / sphere_area(n);
    let (a, c, z) = if log_case || even {
        (regular_part(n, alpha), 0.0, 0.0)
    } else {
        (regular_part(n, alpha), singular_coefficient(n, alpha), zeta(-beta))
    };
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .zip(grid.drds())
        .map(|((&r, &w), &rp)| {
            let (r, w, hr) = (r.as_f64(), w.as_f64(), h * rp.as_f64());
            if log_case {
                w * r.powf(1.0 - nf) * (fin - lead * r.ln() + lead * (hr / two_pi).ln())
            } else {
                w * (a * r.powf(alpha - nf) - 2.0 * z * c * r.powf(1.0 - nf) * hr.powf(beta))
            }
        })
        .collect()
}
