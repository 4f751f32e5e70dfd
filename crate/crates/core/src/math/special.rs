//! Special functions used by the closed-form symbols and subordination identities.

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ∫₀^∞ (1 − cos u) u^{−1−α} du for α ∈ (0, 2).
pub fn one_minus_cos_moment(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-14 {
        std::f64::consts::FRAC_PI_2
    } else {
        gamma(1.0 - alpha) * (std::f64::consts::FRAC_PI_2 * alpha).cos() / alpha
    }
}

/// Upper incomplete gamma Γ(s, x) for x large (asymptotic series, used only for negligible tails).
pub fn upper_gamma_asymptotic(s: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..12 {
        term *= (s - k as f64) / x;
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    x.powf(s - 1.0) * (-x).exp() * sum
}
