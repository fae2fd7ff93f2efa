use crate::scalar::Scalar;

/// LU factors of a tridiagonal matrix for repeated Thomas solves.
#[derive(Clone, Debug)]
pub(crate) struct Tridiagonal<T> {
    lo: Vec<T>,
    up: Vec<T>,
    // pivots after elimination
    piv: Vec<T>,
}

impl<T: Scalar> Tridiagonal<T> {
    /// `lo[0]` and `up[n−1]` are ignored.
    pub fn factor(lo: Vec<T>, di: Vec<T>, up: Vec<T>) -> Self {
        let n = di.len();
        let mut piv = di;
        for k in 1..n {
            let l = lo[k] / piv[k - 1];
            piv[k] -= l * up[k - 1];
        }
        Self { lo, up, piv }
    }

    pub fn solve(&self, rhs: &mut [T]) {
        let n = self.piv.len();
        for k in 1..n {
            let l = self.lo[k] / self.piv[k - 1];
            rhs[k] -= l * rhs[k - 1];
        }
        rhs[n - 1] /= self.piv[n - 1];
        for k in (0..n - 1).rev() {
            rhs[k] = (rhs[k] - self.up[k] * rhs[k + 1]) / self.piv[k];
        }
    }
}
