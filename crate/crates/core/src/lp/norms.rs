//! Generalized Besov and Hölder norms, smooth approximation and the interpolation inequality.

use rayon::prelude::*;
use serde::Serialize;

use super::bank::DyadicBank;
use super::grid::GridFunction;
use crate::error::{check_positive, domain, Result};
use crate::scaling::{HolderRegime, ScalingFunction};

/// Weights w(N^{−j})^{−β}, j = 0..=j_max.
pub fn band_weights(bank: &DyadicBank, sf: &ScalingFunction, beta: f64) -> Vec<f64> {
    (0..=bank.j_max())
        .map(|j| sf.w_unchecked(bank.base().powi(-(j as i32))).powf(-beta))
        .collect()
}

/// max_j w(N^{−j})^{−β} a_j for precomputed band sup-norms a_j.
pub fn besov_from_bands(bands: &[f64], weights: &[f64]) -> f64 {
    bands.iter().zip(weights).map(|(a, w)| a * w).fold(0.0, f64::max)
}

/// |u|_{β,∞} = sup_j w(N^{−j})^{−β} |u ∗ φ_j|₀.
pub fn besov_norm(u: &GridFunction, bank: &DyadicBank, sf: &ScalingFunction, beta: f64) -> Result<f64> {
    check_positive("beta", beta)?;
    Ok(besov_from_bands(&bank.band_sup_norms(u)?, &band_weights(bank, sf, beta)))
}

/// C(β) = Σ_j w(N^{−j})^β, so that |u|₀ ≤ Σ_j |u ∗ φ_j|₀ ≤ C(β)|u|_{β,∞}.
pub fn sup_bound_constant(bank: &DyadicBank, sf: &ScalingFunction, beta: f64) -> f64 {
    band_weights(bank, sf, beta).iter().map(|w| 1.0 / w).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderNorm {
    pub value: f64,
    pub sup: f64,
    pub seminorm: f64,
    pub regime: HolderRegime,
    /// false when the regime admits only constants: the value then grows with refinement
    pub converged: bool,
}

/// Maximum number of shifts examined in two dimensions.
pub const MAX_SHIFTS_2D: usize = 10_000;

/// |u|₀ + max over lattice shifts h (|h| ≤ Λ/2) of |u(·+h) − u|₀ / w(|h|)^β.
pub fn holder_norm(u: &GridFunction, sf: &ScalingFunction, beta: f64) -> Result<HolderNorm> {
    check_positive("beta", beta)?;
    let l = u.lattice();
    let m = l.points() as i64;
    let h = l.spacing();
    let half = l.box_len() / 2.0;
    let shifts: Vec<[i64; 2]> = if l.dim() == 1 {
        (1..=m / 2).map(|s| [s, 0]).collect()
    } else {
        // half plane suffices: the difference for −h is a translate of the one for h
        let mut all = Vec::new();
        for s1 in 0..=m / 2 {
            for s0 in -m / 2..=m / 2 {
                if (s1 == 0 && s0 <= 0) || h * ((s0 * s0 + s1 * s1) as f64).sqrt() > half {
                    continue;
                }
                all.push([s0, s1]);
            }
        }
        let stride = all.len().div_ceil(MAX_SHIFTS_2D);
        all.into_iter().step_by(stride.max(1)).collect()
    };
    let vals = u.values();
    let seminorm = shifts
        .par_iter()
        .map(|s| {
            let len = h * ((s[0] * s[0] + s[1] * s[1]) as f64).sqrt();
            let diff = (0..vals.len())
                .map(|n| (vals[l.shift_index(n, *s)] - vals[n]).norm())
                .fold(0.0, f64::max);
            diff / sf.w_unchecked(len).powf(beta)
        })
        .reduce(|| 0.0, f64::max);
    let sup = u.sup_norm();
    let ap = sf.alpha_prime().value;
    let regime = sf.classify_holder_regime(beta, ap);
    let converged = regime != HolderRegime::ConstantsOnly || seminorm == 0.0;
    Ok(HolderNorm { value: sup + seminorm, sup, seminorm, regime, converged })
}

/// u_n = Σ_{j=0}^{n+2} u ∗ φ_j.
pub fn smooth_approx(u: &GridFunction, bank: &DyadicBank, n: usize) -> Result<GridFunction> {
    if n + 2 > bank.j_max() {
        return Err(domain(format!("smoothing level {n} needs n + 2 ≤ j_max = {}", bank.j_max())));
    }
    let mut m = vec![0.0; u.lattice().len()];
    for j in 0..=n + 2 {
        m.iter_mut().zip(bank.multiplier(j)).for_each(|(a, b)| *a += b);
    }
    Ok(u.apply_real_multiplier(&m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub c_eps: f64,
    pub pass: bool,
}

/// |u|_{β′,∞} ≤ ε|u|_{β,∞} + C_ε|u|₀ with C_ε from Young's inequality and the
/// lattice kernel bound |u ∗ φ_j|₀ ≤ ‖φ_j‖₁|u|₀.
pub fn interpolation_check(
    u: &GridFunction,
    bank: &DyadicBank,
    sf: &ScalingFunction,
    beta_lo: f64,
    beta_hi: f64,
    eps: f64,
) -> Result<InterpolationCheck> {
    if !(beta_lo > 0.0 && beta_lo < beta_hi) {
        return Err(domain(format!("need 0 < β′ < β, got ({beta_lo}, {beta_hi})")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("ε must lie in (0,1), got {eps}")));
    }
    let p = beta_hi / beta_lo;
    let q = beta_hi / (beta_hi - beta_lo);
    let eps_y = (p * eps).powf(1.0 / p);
    let c_eps = bank.max_kernel_l1() / (q * eps_y.powf(q));
    let bands = bank.band_sup_norms(u)?;
    let lhs = besov_from_bands(&bands, &band_weights(bank, sf, beta_lo));
    let rhs = eps * besov_from_bands(&bands, &band_weights(bank, sf, beta_hi)) + c_eps * u.sup_norm();
    Ok(InterpolationCheck { lhs, rhs, c_eps, pass: lhs <= rhs * (1.0 + 1e-12) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::lattice::Lattice;
    use num_complex::Complex64;

    fn setup() -> (DyadicBank, ScalingFunction) {
        let l = Lattice::new(1, 1.0, 1024).unwrap();
        (DyadicBank::new(4.0, &l, None).unwrap(), ScalingFunction::power(0.8).unwrap())
    }

    #[test]
    fn zero_has_zero_norms() {
        let (b, sf) = setup();
        let u = GridFunction::zeros(b.lattice());
        assert_eq!(besov_norm(&u, &b, &sf, 0.5).unwrap(), 0.0);
        assert_eq!(holder_norm(&u, &sf, 0.5).unwrap().value, 0.0);
        let c = interpolation_check(&u, &b, &sf, 0.3, 0.6, 0.5).unwrap();
        assert!(c.pass && c.lhs == 0.0 && c.rhs == 0.0);
    }

    #[test]
    fn single_mode_besov_value() {
        let (b, sf) = setup();
        let k = 37i64;
        let u = GridFunction::mode(b.lattice(), [k, 0], Complex64::new(1.5, 0.0));
        let beta = 0.7;
        let want = (0..=b.j_max())
            .map(|j| 1.5 * super::super::bank::band(4.0, j, k as f64) * sf.w_unchecked(4f64.powi(-(j as i32))).powf(-beta))
            .fold(0.0, f64::max);
        let got = besov_norm(&u, &b, &sf, beta).unwrap();
        assert!((got / want - 1.0).abs() < 1e-10);
    }

    #[test]
    fn holder_of_constant_and_mode() {
        let (b, sf) = setup();
        let c = GridFunction::constant(b.lattice(), Complex64::new(3.0, 0.0));
        let h = holder_norm(&c, &sf, 0.5).unwrap();
        assert_eq!(h.value, 3.0);
        let u = GridFunction::mode(b.lattice(), [2, 0], Complex64::new(1.0, 0.0));
        let h = holder_norm(&u, &sf, 0.5).unwrap();
        assert!(h.value.is_finite() && h.converged && h.regime == HolderRegime::ContainsLipschitz);
        let ratio = h.value / (besov_norm(&u, &b, &sf, 0.5).unwrap() + u.sup_norm());
        assert!(ratio > 0.1 && ratio < 10.0, "{ratio}");
    }

    #[test]
    fn holder_blows_up_for_constants_only_regime() {
        let sf = ScalingFunction::power(0.8).unwrap();
        let beta = 2.0; // 1/β < 0.8
        let mut vals = Vec::new();
        for m in [256, 1024, 4096] {
            let l = Lattice::new(1, 1.0, m).unwrap();
            let u = GridFunction::mode(&l, [1, 0], Complex64::new(1.0, 0.0));
            let h = holder_norm(&u, &sf, beta).unwrap();
            assert!(!h.converged);
            vals.push(h.value);
        }
        assert!(vals[2] > 2.0 * vals[0], "{vals:?}");
    }

    #[test]
    fn smooth_approx_keeps_low_bands() {
        let (b, _) = setup();
        let u = GridFunction::mode(b.lattice(), [3, 0], Complex64::new(1.0, 0.0));
        let a = smooth_approx(&u, &b, 0).unwrap();
        assert!(a.sub(&u).sup_norm() < 1e-12);
        assert!(smooth_approx(&u, &b, b.j_max()).is_err());
    }

    #[test]
    fn interpolation_on_mode() {
        let (b, sf) = setup();
        let u = GridFunction::mode(b.lattice(), [60, 0], Complex64::new(1.0, 0.0));
        for eps in [0.01, 0.3, 0.9] {
            let c = interpolation_check(&u, &b, &sf, 0.4, 0.9, eps).unwrap();
            assert!(c.pass, "{c:?}");
        }
        assert!(interpolation_check(&u, &b, &sf, 0.9, 0.4, 0.5).is_err());
    }
}
