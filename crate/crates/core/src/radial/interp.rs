use crate::scalar::Scalar;

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes, which
/// preserves monotonicity of the data.
pub struct MonotoneCubic<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
}

impl<T: Scalar> MonotoneCubic<T> {
    /// Knots `(0, y0)` followed by `(x_i, y_i)`.
    pub fn new(x: &[T], y: &[T], y0: T) -> Self {
        let mut xs = Vec::with_capacity(x.len() + 1);
        let mut ys = Vec::with_capacity(y.len() + 1);
        xs.push(T::zero());
        ys.push(y0);
        xs.extend_from_slice(x);
        ys.extend_from_slice(y);
        let n = xs.len();
        let delta: Vec<T> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut d = vec![T::zero(); n];
        // even symmetry at the origin
        d[0] = T::zero();
        d[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            if a * b <= T::zero() {
                d[i] = T::zero();
            } else {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = T::of(2.0) * h1 + h0;
                let w2 = h1 + T::of(2.0) * h0;
                d[i] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        Self { x: xs, y: ys, d }
    }

    pub fn eval(&self, t: T) -> T {
        let n = self.x.len();
        if t <= T::zero() {
            return self.y[0];
        }
        if t > self.x[n - 1] {
            return T::zero();
        }
        let k = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::of(2.0);
        let three = T::of(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_monotonicity() {
        let x: Vec<f64> = (1..=50).map(|i| (i as f64 / 50.0).powi(2) * 10.0).collect();
        let y: Vec<f64> = x.iter().map(|r| (-r * r).exp()).collect();
        let p = MonotoneCubic::new(&x, &y, 1.0);
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(p.eval(*xi), *yi);
        }
        let mut prev = f64::INFINITY;
        for k in 0..2000 {
            let v = p.eval(k as f64 * 0.005);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert_eq!(p.eval(11.0), 0.0);
    }

    #[test]
    fn smooth_data_accuracy() {
        let x: Vec<f64> = (1..=2000).map(|i| (i as f64 / 2000.0).powi(2) * 30.0).collect();
        let y: Vec<f64> = x.iter().map(|r| (-r * r / 2.0).exp()).collect();
        let p = MonotoneCubic::new(&x, &y, 1.0);
        for k in 0..300 {
            let r = 0.013 + k as f64 * 0.02;
            assert!((p.eval(r) - (-r * r / 2.0).exp()).abs() < 1e-6);
        }
    }
}
