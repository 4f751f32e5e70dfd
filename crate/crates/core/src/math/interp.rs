//! Monotone piecewise-cubic interpolation (Fritsch–Carlson) and log-log tables.

use crate::error::{Error, Result};

/// Shape-preserving cubic Hermite interpolant with linear extrapolation by the end secants.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Input("interpolation needs at least two points".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("interpolation abscissae must be strictly increasing".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Input("interpolation data must be finite".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        d[0] = s[0];
        d[n - 1] = s[n - 2];
        for i in 1..n - 1 {
            if s[i - 1] * s[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                // weighted harmonic mean
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
        Ok(MonotoneCubic { x, y, d })
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            let s = (self.y[1] - self.y[0]) / (self.x[1] - self.x[0]);
            return self.y[0] + s * (t - self.x[0]);
        }
        if t >= self.x[n - 1] {
            let s = (self.y[n - 1] - self.y[n - 2]) / (self.x[n - 1] - self.x[n - 2]);
            return self.y[n - 1] + s * (t - self.x[n - 1]);
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// Positive function tabulated as (ln x, ln y) with monotone-cubic interpolation;
/// outside the table it extends as a power law.
#[derive(Debug, Clone)]
pub struct LogLogTable {
    inner: MonotoneCubic,
}

impl LogLogTable {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.iter().chain(y).any(|v| !(*v > 0.0)) {
            return Err(Error::Input("log-log table needs strictly positive data".into()));
        }
        let lx = x.iter().map(|v| v.ln()).collect();
        let ly = y.iter().map(|v| v.ln()).collect();
        Ok(LogLogTable { inner: MonotoneCubic::new(lx, ly)? })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x.ln()).exp()
    }

    pub fn range(&self) -> (f64, f64) {
        let (a, b) = self.inner.x_range();
        (a.exp(), b.exp())
    }
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_power_laws_exactly_in_log_log() {
        let x = logspace(1e-3, 1e3, 40);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-1.7)).collect();
        let t = LogLogTable::new(&x, &y).unwrap();
        for &v in &[2e-3, 0.37, 1.0, 55.0, 5e3, 1e-5] {
            let want = 3.0 * f64::powf(v, -1.7);
            assert!((t.eval(v) / want - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(
            steps in proptest::collection::vec(0.0f64..2.0, 3..12),
            probes in proptest::collection::vec(0.0f64..1.0, 20),
        ) {
            let x: Vec<f64> = (0..steps.len()).map(|i| i as f64).collect();
            let mut acc = 0.0;
            let y: Vec<f64> = steps.iter().map(|s| { acc += s; acc }).collect();
            let m = MonotoneCubic::new(x.clone(), y).unwrap();
            let top = (steps.len() - 1) as f64;
            let mut ps: Vec<f64> = probes.iter().map(|p| p * top).collect();
            ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for w in ps.windows(2) {
                prop_assert!(m.eval(w[1]) >= m.eval(w[0]) - 1e-12);
            }
        }
    }
}
