//! Gauss–Legendre rules, log-spaced composite quadrature and power-law tails.

use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for k in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * k + 1) as f64 * z * p2 - k as f64 * p3) / (k + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussRule { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    #[inline]
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }

    /// Integral of a complex-valued `f` over [a, b].
    #[inline]
    pub fn integrate_complex(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> num_complex::Complex64) -> num_complex::Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }
}

pub fn gl8() -> &'static GaussRule {
    static R: OnceLock<GaussRule> = OnceLock::new();
    R.get_or_init(|| GaussRule::new(8))
}

pub fn gl16() -> &'static GaussRule {
    static R: OnceLock<GaussRule> = OnceLock::new();
    R.get_or_init(|| GaussRule::new(16))
}

/// Composite rule on log-spaced panels of [a, b], `per_decade` panels per decade.
pub fn log_panels(
    rule: &GaussRule,
    a: f64,
    b: f64,
    per_decade: f64,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    if !(b > a) || a <= 0.0 {
        return 0.0;
    }
    let (la, lb) = (a.ln(), b.ln());
    let decades = (lb - la) / std::f64::consts::LN_10;
    let panels = ((decades * per_decade).ceil() as usize).max(1);
    let h = (lb - la) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let u0 = la + h * p as f64;
        total += rule.integrate(u0, u0 + h, |u| {
            let x = u.exp();
            f(x) * x
        });
    }
    total
}

/// Composite rule on uniform panels of [a, b].
pub fn uniform_panels(
    rule: &GaussRule,
    a: f64,
    b: f64,
    panels: usize,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let x0 = a + h * p as f64;
            rule.integrate(x0, x0 + h, &mut f)
        })
        .sum()
}

/// Local log-log slope of `f` at `x` (one-sided toward `dir` = ±1).
pub fn log_slope(f: &mut impl FnMut(f64) -> f64, x: f64, dir: f64) -> Option<f64> {
    let h = 0.05;
    let x2 = x * (dir * h).exp();
    let (f1, f2) = (f(x), f(x2));
    if f1 == 0.0 || f2 == 0.0 || f1.signum() != f2.signum() || !f1.is_finite() || !f2.is_finite() {
        return None;
    }
    Some((f2.abs() / f1.abs()).ln() / (dir * h))
}

/// Integral of a power-law extrapolation of `f` over (0, a]. `None` if it diverges.
pub fn power_tail_below(mut f: impl FnMut(f64) -> f64, a: f64) -> Option<f64> {
    let fa = f(a);
    if fa == 0.0 {
        return Some(0.0);
    }
    let q = log_slope(&mut f, a, 1.0)?;
    if q <= -1.0 {
        return None;
    }
    Some(a * fa / (q + 1.0))
}

/// Integral of a power-law extrapolation of `f` over [b, ∞). `None` if it diverges.
pub fn power_tail_above(mut f: impl FnMut(f64) -> f64, b: f64) -> Option<f64> {
    let fb = f(b);
    if fb == 0.0 {
        return Some(0.0);
    }
    let q = log_slope(&mut f, b, -1.0)?;
    if q >= -1.0 {
        return None;
    }
    Some(-b * fb / (q + 1.0))
}

/// Integral over (0, ∞) of a function that is a power law near 0 and near ∞:
/// log panels on [lo, hi] plus analytic tails. `None` if a tail diverges.
pub fn half_line(
    lo: f64,
    hi: f64,
    per_decade: f64,
    mut f: impl FnMut(f64) -> f64,
) -> Option<f64> {
    let body = log_panels(gl8(), lo, hi, per_decade, &mut f);
    let below = power_tail_below(&mut f, lo)?;
    let above = power_tail_above(&mut f, hi)?;
    Some(body + below + above)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let r = GaussRule::new(8);
        // degree 15 is exact for 8 nodes
        let v = r.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-10);
        let sw: f64 = r.weights.iter().sum();
        assert!((sw - 2.0).abs() < 1e-14);
    }

    #[test]
    fn half_line_power_integrand() {
        // ∫_0^∞ x^{-1/2} e^{-x} dx = Γ(1/2)
        let v = half_line(1e-10, 50.0, 6.0, |x| x.powf(-0.5) * (-x).exp()).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn tails_detect_divergence() {
        assert!(power_tail_below(|x| x.powf(-1.5), 1e-3).is_none());
        assert!(power_tail_above(|x| x.powf(-0.5), 1e3).is_none());
        let t = power_tail_above(|x| x.powf(-2.0), 10.0).unwrap();
        assert!((t - 0.1).abs() < 1e-12);
    }
}
