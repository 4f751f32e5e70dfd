//! Scaling functions w with scaling factors l: w(εr) ≤ l(ε)·w(r), normalized so w(1) = 1.

use serde::Serialize;

use crate::error::{check_positive, domain, Error, Result};
use crate::levy::LevyModel;
use crate::math::interp::{logspace, LogLogTable};
use crate::math::{quad, stats};

/// How w was specified.
#[derive(Debug, Clone)]
pub enum ScalingKind {
    PowerLaw(f64),
    /// w(r) = j(1) / (j(r) r^d) for the radial density j of the model
    BernsteinInduced(Box<LevyModel>),
    Tabulated(LogLogTable),
}

/// Envelope indices: c0 (x^{r1} ∧ x^{r2}) ≤ w(x) ≤ c_big (x^{r1} ∨ x^{r2}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub r1: f64,
    pub r2: f64,
    pub c0: f64,
    pub c_big: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrability {
    Holds,
    Fails,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaIntegrability {
    pub verdict: Integrability,
    /// ∫_{t_min}^1 l(t)^β dt/t
    pub lower: f64,
    /// ∫_1^{t_max} l(t)^β dt/t²
    pub upper: f64,
    pub lower_tail: f64,
    pub upper_tail: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderRegime {
    Nontrivial,
    ContainsLipschitz,
    LipschitzExactly,
    ConstantsOnly,
}

/// Grid estimate of inf{σ : limsup_{r→0} r^σ / w(r) = 0}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaPrime {
    pub value: f64,
    /// smallest probe radius the estimate rests on
    pub smallest_radius: f64,
}

pub const PROBE_MIN: f64 = 1e-4;
pub const PROBE_MAX: f64 = 1e4;
pub const PROBE_POINTS: usize = 512;
const BETA_T_MIN: f64 = 1e-8;
const BETA_T_MAX: f64 = 1e8;

pub fn default_probe_grid() -> Vec<f64> {
    logspace(PROBE_MIN, PROBE_MAX, PROBE_POINTS)
}

#[derive(Debug, Clone)]
pub struct ScalingFunction {
    kind: ScalingKind,
    /// l(ε) = factor·ε^{exponents.0} for ε ≤ 1, factor·ε^{exponents.1} for ε > 1
    factor: f64,
    exponents: (f64, f64),
    probe: Vec<f64>,
    envelope: Envelope,
    tabulated_norm: f64,
}

impl ScalingFunction {
    pub fn power(alpha: f64) -> Result<ScalingFunction> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(domain(format!("power-law exponent must be positive, got {alpha}")));
        }
        Self::finish(ScalingKind::PowerLaw(alpha), 1.0, (alpha, alpha), 1.0)
    }

    /// w(r) = j(1)/(j(r) r^d) from the radial profile of an unscaled model.
    pub fn induced(model: &LevyModel) -> Result<ScalingFunction> {
        let mut base = model.clone();
        if base.scale() != 1.0 || base.mass() != 1.0 {
            return Err(domain("the inducing model must be unscaled"));
        }
        base = base.symmetrize();
        let exps = base.exponents();
        let kind = ScalingKind::BernsteinInduced(Box::new(base));
        let mut sf = Self::finish(kind, 1.0, exps, 1.0)?;
        // smallest factor making l dominate every probe ratio
        let grid = logspace(PROBE_MIN, PROBE_MAX, 97);
        let mut c = 1f64;
        for &e in grid.iter().chain(std::iter::once(&1.0)) {
            let pe = if e <= 1.0 { e.powf(exps.0) } else { e.powf(exps.1) };
            for &r in &grid {
                let ratio = sf.w_unchecked(e * r) / sf.w_unchecked(r) / pe;
                if !ratio.is_finite() {
                    return Err(Error::Model(format!("induced scaling function not finite near r={r}")));
                }
                c = c.max(ratio);
            }
        }
        sf.factor = c * (1.0 + 1e-12);
        Ok(sf)
    }

    /// Nondecreasing positive table of (r, w); renormalized so that w(1) = 1.
    pub fn tabulated(radii: &[f64], values: &[f64]) -> Result<ScalingFunction> {
        if radii.len() < 4 || radii.len() != values.len() {
            return Err(Error::Input("scaling table needs at least 4 (r, w) rows".into()));
        }
        if radii.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::Input("scaling table radii must be strictly increasing".into()));
        }
        if values.windows(2).any(|p| p[1] < p[0]) {
            return Err(Error::Input("scaling table values must be nondecreasing".into()));
        }
        if !(radii[0] <= 1.0 && *radii.last().unwrap() >= 1.0) {
            return Err(Error::Input("scaling table must bracket r = 1".into()));
        }
        let table = LogLogTable::new(radii, values)?;
        let norm = table.eval(1.0);
        let mut f = |r: f64| table.eval(r);
        let lo = quad::log_slope(&mut f, radii[0], -1.0).unwrap_or(0.0);
        let hi = quad::log_slope(&mut f, *radii.last().unwrap(), 1.0).unwrap_or(0.0);
        Self::finish(ScalingKind::Tabulated(table), 1.0, (lo, hi), norm)
    }

    fn finish(kind: ScalingKind, factor: f64, exponents: (f64, f64), norm: f64) -> Result<ScalingFunction> {
        let mut sf = ScalingFunction {
            kind,
            factor,
            exponents,
            probe: default_probe_grid(),
            envelope: Envelope { r1: 0.0, r2: 0.0, c0: 0.0, c_big: 0.0 },
            tabulated_norm: norm,
        };
        sf.envelope = sf.estimate_indices(&sf.probe.clone())?;
        Ok(sf)
    }

    pub fn kind(&self) -> &ScalingKind {
        &self.kind
    }

    pub fn probe_grid(&self) -> &[f64] {
        &self.probe
    }

    /// Cached envelope on the default probe grid.
    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    pub fn w(&self, r: f64) -> Result<f64> {
        check_positive("r", r)?;
        Ok(self.w_unchecked(r))
    }

    #[inline]
    pub fn w_unchecked(&self, r: f64) -> f64 {
        if r == 1.0 {
            return 1.0;
        }
        match &self.kind {
            ScalingKind::PowerLaw(a) => r.powf(*a),
            ScalingKind::BernsteinInduced(m) => {
                m.radial_density(1.0) / (m.radial_density(r) * r.powi(m.dim() as i32))
            }
            ScalingKind::Tabulated(t) => t.eval(r) / self.tabulated_norm,
        }
    }

    pub fn l(&self, eps: f64) -> Result<f64> {
        check_positive("eps", eps)?;
        Ok(self.l_unchecked(eps))
    }

    pub fn l_unchecked(&self, eps: f64) -> f64 {
        match &self.kind {
            ScalingKind::PowerLaw(a) => eps.powf(*a),
            ScalingKind::BernsteinInduced(_) => {
                let e = if eps <= 1.0 { self.exponents.0 } else { self.exponents.1 };
                self.factor * eps.powf(e)
            }
            ScalingKind::Tabulated(_) => self
                .probe
                .iter()
                .map(|&r| self.w_unchecked(eps * r) / self.w_unchecked(r))
                .fold(0.0, f64::max),
        }
    }

    /// Local log-slopes of l at the ends of the integrability range.
    fn end_slopes(&self) -> (f64, f64) {
        match &self.kind {
            ScalingKind::PowerLaw(a) => (*a, *a),
            ScalingKind::BernsteinInduced(_) => self.exponents,
            ScalingKind::Tabulated(_) => {
                let mut f = |t: f64| self.l_unchecked(t);
                (
                    quad::log_slope(&mut f, BETA_T_MIN, 1.0).unwrap_or(0.0),
                    quad::log_slope(&mut f, BETA_T_MAX, -1.0).unwrap_or(0.0),
                )
            }
        }
    }

    /// Regression of log w on log x per branch; c0 and c_big are the tight constants on the grid.
    pub fn estimate_indices(&self, grid: &[f64]) -> Result<Envelope> {
        let (gmin, gmax) = (grid.iter().cloned().fold(f64::INFINITY, f64::min), grid.iter().cloned().fold(0.0, f64::max));
        if !(gmin <= 1e-2 && gmax >= 1e2) {
            return Err(Error::Estimation("probe grid must span at least four decades around 1".into()));
        }
        let mut lo = (Vec::new(), Vec::new());
        let mut hi = (Vec::new(), Vec::new());
        for &x in grid {
            let w = self.w_unchecked(x);
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Estimation(format!("w is not positive and finite at x={x}")));
            }
            let side = if x < 1.0 { &mut lo } else { &mut hi };
            side.0.push(x.ln());
            side.1.push(w.ln());
        }
        let s_lo = stats::linear_fit(&lo.0, &lo.1).map(|f| f.slope);
        let s_hi = stats::linear_fit(&hi.0, &hi.1).map(|f| f.slope);
        let (Some(a), Some(b)) = (s_lo, s_hi) else {
            return Err(Error::Estimation("too few probe points on one side of 1".into()));
        };
        let (r1, r2) = (a.max(b), a.min(b));
        let mut c0 = f64::INFINITY;
        let mut c_big = 0f64;
        for &x in grid {
            let w = self.w_unchecked(x);
            let (p1, p2) = (x.powf(r1), x.powf(r2));
            c0 = c0.min(w / p1.min(p2));
            c_big = c_big.max(w / p1.max(p2));
        }
        if !(c0 > 0.0 && c_big.is_finite()) {
            let bad = grid
                .iter()
                .find(|&&x| {
                    let w = self.w_unchecked(x);
                    !(w / x.powf(r1).min(x.powf(r2)) > 0.0)
                })
                .copied()
                .unwrap_or(f64::NAN);
            return Err(Error::Estimation(format!("envelope infeasible at x={bad}")));
        }
        Ok(Envelope { r1, r2, c0, c_big })
    }

    /// γ(x) = inf{s : l(s) ≥ x} by bisection in log s on [1e-12, 1e12]; returns the upper end.
    pub fn gamma_inverse(&self, x: f64) -> Result<f64> {
        check_positive("x", x)?;
        let (mut a, mut b) = (1e-12f64.ln(), 1e12f64.ln());
        if self.l_unchecked(a.exp()) >= x || self.l_unchecked(b.exp()) < x {
            return Err(Error::Bracket(format!("l does not cross {x} on [1e-12, 1e12]")));
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.l_unchecked(m.exp()) >= x {
                b = m;
            } else {
                a = m;
            }
        }
        Ok(b.exp())
    }

    /// ∫₀¹ l(t)^β dt/t + ∫₁^∞ l(t)^β dt/t², truncated at [1e-8, 1e8] with power-law tails.
    pub fn check_beta_integrability(&self, beta: f64) -> Result<BetaIntegrability> {
        check_positive("beta", beta)?;
        let f_lo = |t: f64| self.l_unchecked(t).powf(beta) / t;
        let f_hi = |t: f64| self.l_unchecked(t).powf(beta) / (t * t);
        let lower = quad::log_panels(quad::gl8(), BETA_T_MIN, 1.0, 8.0, f_lo);
        let upper = quad::log_panels(quad::gl8(), 1.0, BETA_T_MAX, 8.0, f_hi);
        let (p0, pinf) = self.end_slopes();
        let lower_tail = if beta * p0 > 0.0 {
            self.l_unchecked(BETA_T_MIN).powf(beta) / (beta * p0)
        } else {
            f64::INFINITY
        };
        let upper_tail = if beta * pinf < 1.0 {
            self.l_unchecked(BETA_T_MAX).powf(beta) / BETA_T_MAX / (1.0 - beta * pinf)
        } else {
            f64::INFINITY
        };
        let total = lower + upper + lower_tail + upper_tail;
        let verdict = if !total.is_finite() {
            Integrability::Fails
        } else if beta * pinf > 1.0 - 1e-6 {
            Integrability::Marginal
        } else {
            Integrability::Holds
        };
        Ok(BetaIntegrability { verdict, lower, upper, lower_tail, upper_tail, total })
    }

    /// Slope of log w over the smallest two probe decades.
    pub fn alpha_prime(&self) -> AlphaPrime {
        let r0 = self.probe[0];
        let rs = logspace(r0, r0 * 100.0, 33);
        let x: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        let y: Vec<f64> = rs.iter().map(|&r| self.w_unchecked(r).ln()).collect();
        let value = stats::linear_fit(&x, &y).map(|f| f.slope).unwrap_or(f64::NAN);
        AlphaPrime { value, smallest_radius: r0 }
    }

    /// Exponent of w at small radii (the grid estimate of α′).
    pub fn small_scale_index(&self) -> f64 {
        self.alpha_prime().value
    }

    pub fn classify_holder_regime(&self, beta: f64, alpha_prime: f64) -> HolderRegime {
        let inv = 1.0 / beta;
        if (inv - alpha_prime).abs() <= 1e-9 * alpha_prime.abs().max(1.0) {
            // trend of log(r^{α′}/w(r)) as r → 0 over the smallest probe decades
            let r0 = self.probe[0];
            let rs = logspace(r0, r0 * 100.0, 33);
            let x: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
            let y: Vec<f64> = rs
                .iter()
                .map(|&r| alpha_prime * r.ln() - self.w_unchecked(r).ln())
                .collect();
            let slope = stats::linear_fit(&x, &y).map(|f| f.slope).unwrap_or(0.0);
            if slope > 0.02 {
                HolderRegime::Nontrivial
            } else if slope < -0.02 {
                HolderRegime::ConstantsOnly
            } else {
                HolderRegime::LipschitzExactly
            }
        } else if inv < alpha_prime {
            HolderRegime::ConstantsOnly
        } else {
            HolderRegime::ContainsLipschitz
        }
    }

    /// Exponent pair of l (ε ≤ 1, ε > 1) and its constant factor.
    pub fn l_form(&self) -> (f64, (f64, f64)) {
        (self.factor, self.exponents)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ScalingKind::PowerLaw(a) => format!("power({a})"),
            ScalingKind::BernsteinInduced(m) => format!("induced({})", m.describe()),
            ScalingKind::Tabulated(t) => format!("table{:?}", t.range()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{bernstein::heat_average, Angular, BernsteinPhi};
    use proptest::prelude::*;

    fn bernstein_sf() -> (ScalingFunction, (f64, f64)) {
        let phi = BernsteinPhi::new(2, vec![0.5, 0.4]).unwrap();
        let d = phi.deltas();
        let m = LevyModel::bernstein(1, phi, Angular::uniform(1)).unwrap();
        (ScalingFunction::induced(&m).unwrap(), d)
    }

    #[test]
    fn power_law_values() {
        let sf = ScalingFunction::power(0.5).unwrap();
        assert_eq!(sf.w(4.0).unwrap(), 2.0);
        assert_eq!(sf.w(1.0).unwrap(), 1.0);
        assert_eq!(sf.l(0.25).unwrap(), 0.5);
        assert_eq!(sf.l(1.0).unwrap(), 1.0);
        assert!(sf.w(0.0).is_err() && sf.w(f64::NAN).is_err() && sf.l(-1.0).is_err());
    }

    #[test]
    fn induced_from_square_root_subordinator() {
        let phi = BernsteinPhi::new(1, vec![0.5]).unwrap();
        let m = LevyModel::bernstein(1, phi.clone(), Angular::uniform(1)).unwrap();
        let sf = ScalingFunction::induced(&m).unwrap();
        // independent quadrature of j from the subordinator density
        let j = heat_average(1, &[0.25, 1.0], |t| phi.levy_density_numeric(t));
        let raw = 1.0 / (j[0] * 0.25);
        let norm = 1.0 / j[1];
        assert!((sf.w(0.25).unwrap() - raw / norm).abs() < 1e-6);
        assert_eq!(sf.w(1.0).unwrap(), 1.0);
    }

    #[test]
    fn bernstein_l_is_piecewise_power() {
        let (sf, (d1, d2)) = bernstein_sf();
        let (c, (e0, e1)) = sf.l_form();
        assert!((e0 - 2.0 * d1).abs() < 1e-15 && (e1 - 2.0 * d2).abs() < 1e-15);
        assert!((sf.l(2.0).unwrap() - c * 2f64.powf(2.0 * d2)).abs() < 1e-14);
        assert!(c >= 1.0);
    }

    #[test]
    fn indices_of_power_laws() {
        for a in [0.7, 1.0] {
            let sf = ScalingFunction::power(a).unwrap();
            let e = sf.envelope();
            assert!((e.r1 - a).abs() < 1e-6 && (e.r2 - a).abs() < 1e-6);
        }
    }

    #[test]
    fn bernstein_indices_within_deltas() {
        let (sf, (d1, d2)) = bernstein_sf();
        let e = sf.envelope();
        let tol = 5e-3;
        assert!(e.r1 <= 2.0 * d2 + tol && e.r2 >= 2.0 * d1 - tol, "{e:?}");
        assert!(e.r1 >= e.r2);
    }

    #[test]
    fn envelope_rejects_short_grid() {
        let sf = ScalingFunction::power(0.5).unwrap();
        assert!(sf.estimate_indices(&logspace(0.5, 2.0, 10)).is_err());
    }

    #[test]
    fn gamma_inverse_values() {
        let sf = ScalingFunction::power(0.5).unwrap();
        assert!((sf.gamma_inverse(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((sf.gamma_inverse(2.0).unwrap() - 4.0).abs() < 1e-12);
        assert!(sf.gamma_inverse(1e20).is_err());
        let (b, _) = bernstein_sf();
        let e = b.envelope();
        let x = 0.3;
        let g = b.gamma_inverse(x).unwrap();
        assert!(b.l(g).unwrap() >= x && b.l(g * (1.0 - 1e-9)).unwrap() < x);
        let bound = (e.c_big / e.c0) * x.powf(1.0 / e.r1).max(x.powf(1.0 / e.r2));
        assert!(g <= bound, "{g} {bound}");
    }

    #[test]
    fn beta_integrability_verdicts() {
        let sf = ScalingFunction::power(0.8).unwrap();
        let ok = sf.check_beta_integrability(1.0).unwrap();
        assert_eq!(ok.verdict, Integrability::Holds);
        // 1/(0.8) + 1/(1−0.8)
        assert!((ok.total - (1.25 + 5.0)).abs() < 1e-8, "{}", ok.total);
        assert_eq!(sf.check_beta_integrability(1.25).unwrap().verdict, Integrability::Fails);
        assert_eq!(sf.check_beta_integrability(2.0).unwrap().verdict, Integrability::Fails);
        let b = (1.0 - 1e-9) / 0.8;
        assert_eq!(sf.check_beta_integrability(b).unwrap().verdict, Integrability::Marginal);
    }

    #[test]
    fn holder_regimes_for_power_laws() {
        let sf = ScalingFunction::power(0.5).unwrap();
        let ap = sf.alpha_prime();
        assert!((ap.value - 0.5).abs() < 1e-12);
        assert!((ap.smallest_radius / PROBE_MIN - 1.0).abs() < 1e-12);
        assert_eq!(sf.classify_holder_regime(1.5, ap.value), HolderRegime::ContainsLipschitz);
        assert_eq!(sf.classify_holder_regime(2.5, ap.value), HolderRegime::ConstantsOnly);
        assert_eq!(sf.classify_holder_regime(2.0, ap.value), HolderRegime::LipschitzExactly);
    }

    #[test]
    fn holder_regime_boundary_with_log_correction() {
        // w(r) = r^{1/2}/ln(e/r)² near 0: r^{1/2}/w → ∞ slowly
        let r = logspace(1e-6, 1e6, 200);
        let w: Vec<f64> = r
            .iter()
            .map(|&x| if x > 1.0 { x.sqrt() } else { x.sqrt() / (std::f64::consts::E / x).ln().powi(2) })
            .collect();
        let sf = ScalingFunction::tabulated(&r, &w).unwrap();
        assert_eq!(sf.w(1.0).unwrap(), 1.0);
        assert_eq!(sf.classify_holder_regime(2.0, 0.5), HolderRegime::ConstantsOnly);
        let w: Vec<f64> = r
            .iter()
            .map(|&x| if x > 1.0 { x.sqrt() } else { x.sqrt() * (1.0 - x.ln()).powf(0.4) })
            .collect();
        let sf = ScalingFunction::tabulated(&r, &w).unwrap();
        assert_eq!(sf.classify_holder_regime(2.0, 0.5), HolderRegime::Nontrivial);
        let w: Vec<f64> = r
            .iter()
            .map(|&x| if x > 1.0 { x.sqrt() } else { x.sqrt() * (std::f64::consts::E / x).ln().powi(2) })
            .collect();
        let sf = ScalingFunction::tabulated(&r, &w);
        // r^{1/2}·ln(e/r)² is not monotone near 0, so it cannot be a table
        assert!(sf.is_err());
    }

    #[test]
    fn bracket_around_one() {
        let (sf, _) = bernstein_sf();
        for n in [4.0, 6.0] {
            assert!(sf.l(1.0 / n).unwrap() < 1.0 && sf.l(n).unwrap() > 1.0);
        }
    }

    #[test]
    fn tabulated_validation() {
        assert!(ScalingFunction::tabulated(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(ScalingFunction::tabulated(&[0.1, 0.5, 2.0, 3.0], &[1.0, 0.5, 2.0, 3.0]).is_err());
        assert!(ScalingFunction::tabulated(&[2.0, 3.0, 4.0, 5.0], &[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn scaling_inequality_on_probe_pairs(i in 0usize..512, k in 0usize..512) {
            let (sf, _) = bernstein_sf();
            let g = sf.probe_grid();
            let (e, r) = (g[i], g[k]);
            prop_assert!(sf.w_unchecked(e * r) <= sf.l_unchecked(e) * sf.w_unchecked(r) * (1.0 + 1e-9));
        }

        #[test]
        fn envelope_and_l_lower_bound(i in 0usize..512, a in 0.1f64..1.9) {
            for sf in [ScalingFunction::power(a).unwrap(), bernstein_sf().0] {
                let e = sf.envelope();
                let x = sf.probe_grid()[i];
                let w = sf.w_unchecked(x);
                let (p1, p2) = (x.powf(e.r1), x.powf(e.r2));
                prop_assert!(w >= e.c0 * p1.min(p2) * (1.0 - 1e-12));
                prop_assert!(w <= e.c_big * p1.max(p2) * (1.0 + 1e-12));
                prop_assert!(sf.l_unchecked(x) >= (e.c0 / e.c_big) * p1.min(p2) * (1.0 - 1e-9));
            }
        }

        #[test]
        fn l_and_gamma_are_monotone(x in 1e-2f64..1e2, y in 1e-2f64..1e2, a in 0.5f64..1.9) {
            let sf = ScalingFunction::power(a).unwrap();
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            prop_assert!(sf.l_unchecked(lo) <= sf.l_unchecked(hi));
            prop_assert!(sf.gamma_inverse(lo).unwrap() <= sf.gamma_inverse(hi).unwrap());
        }

        #[test]
        fn tabulated_l_dominates(i in 0usize..512, k in 0usize..512) {
            let r = logspace(1e-6, 1e6, 60);
            let w: Vec<f64> = r.iter().map(|&x| x.powf(0.4) + x.powf(1.3)).collect();
            let sf = ScalingFunction::tabulated(&r, &w).unwrap();
            let g = sf.probe_grid();
            prop_assert!(sf.w_unchecked(g[i] * g[k]) <= sf.l_unchecked(g[i]) * sf.w_unchecked(g[k]) * (1.0 + 1e-12));
        }
    }
}
