//! Fixed-Talbot numerical inversion of Laplace transforms.

use num_complex::Complex64;

/// f(t) from its Laplace transform `big_f`, which must be analytic off the
/// negative real axis. `m` terms (16–32 is the useful range in double precision).
pub fn invert(big_f: impl Fn(Complex64) -> Complex64, t: f64, m: usize) -> f64 {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (big_f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * std::f64::consts::PI / m as f64;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t).exp() * big_f(s) * Complex64::new(1.0, sigma);
        sum += term.re;
    }
    r / m as f64 * sum
}
