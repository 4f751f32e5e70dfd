//! Increment samplers for the Lévy process driven by a model.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use super::{Angular, Cutoff, LevyModel, ModelKind, PANELS_PER_DECADE};
use crate::error::{Error, Result};
use crate::math::special::gamma;
use crate::rng::Stream;

use std::f64::consts::{FRAC_PI_2, PI};

/// Jump-diffusion sampler: compound Poisson for |y| > eps, Gaussian for the rest,
/// plus the drift implied by the cutoff convention.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    model: LevyModel,
    eps: f64,
    big_rate: f64,
    dirs: Vec<[f64; 2]>,
    cumulative: Vec<f64>,
    chol: [[f64; 2]; 2],
    small_variance: f64,
    drift: [f64; 2],
}

impl IncrementSampler {
    pub fn new(model: &LevyModel, eps: f64) -> Result<IncrementSampler> {
        if !(eps.is_finite() && eps > super::R_MIN && eps < 1.0) {
            return Err(Error::Parameter(format!("small-jump cutoff {eps} outside ({}, 1)", super::R_MIN)));
        }
        let atoms = model.angular().atoms();
        let total = model.angular().total();
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for (_, m) in &atoms {
            acc += m / total;
            cumulative.push(acc);
        }
        let big_rate = model.tail_mass(eps)?;
        let second = model.radial_integral(0.0, eps, PANELS_PER_DECADE, |r| r * r)?;
        let mut cov = [[0.0; 2]; 2];
        for (th, m) in &atoms {
            for a in 0..2 {
                for b in 0..2 {
                    cov[a][b] += m * th[a] * th[b] * second;
                }
            }
        }
        let l00 = cov[0][0].max(0.0).sqrt();
        let l10 = if l00 > 0.0 { cov[1][0] / l00 } else { 0.0 };
        let l11 = (cov[1][1] - l10 * l10).max(0.0).sqrt();
        let m1 = model.angular().first_moment();
        let radial_drift = match model.cutoff() {
            Cutoff::All => -model.radial_integral(eps, f64::INFINITY, PANELS_PER_DECADE, |r| r)?,
            Cutoff::UnitBall => -model.radial_integral(eps, 1.0, PANELS_PER_DECADE, |r| r)?,
            Cutoff::NoCompensation => model.radial_integral(0.0, eps, PANELS_PER_DECADE, |r| r)?,
        };
        Ok(IncrementSampler {
            model: model.clone(),
            eps,
            big_rate,
            dirs: atoms.iter().map(|a| a.0).collect(),
            cumulative,
            chol: [[l00, 0.0], [l10, l11]],
            small_variance: cov[0][0] + cov[1][1],
            drift: [m1[0] * radial_drift, m1[1] * radial_drift],
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Intensity ν(|y| > eps) of the compound Poisson part.
    pub fn jump_rate(&self) -> f64 {
        self.big_rate
    }

    /// trace of ∫_{|y|≤eps} y yᵀ ν(dy).
    pub fn small_jump_variance(&self) -> f64 {
        self.small_variance
    }

    pub fn drift(&self) -> [f64; 2] {
        self.drift
    }

    fn direction(&self, rng: &mut Stream) -> [f64; 2] {
        let u: f64 = rng.gen();
        let k = self.cumulative.partition_point(|&c| c < u).min(self.dirs.len() - 1);
        self.dirs[k]
    }

    /// Gaussian part only, covariance t·∫_{|y|≤eps} y yᵀ ν(dy).
    pub fn sample_small(&self, t: f64, rng: &mut Stream) -> [f64; 2] {
        let s = t.sqrt();
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = if self.model.dim() == 2 { rng.sample(StandardNormal) } else { 0.0 };
        let c = &self.chol;
        [s * c[0][0] * z0, s * (c[1][0] * z0 + c[1][1] * z1)]
    }

    pub fn sample(&self, t: f64, rng: &mut Stream) -> [f64; 2] {
        let mut x = self.sample_small(t, rng);
        x[0] += t * self.drift[0];
        x[1] += t * self.drift[1];
        let lam = t * self.big_rate;
        let n = if lam > 0.0 {
            Poisson::new(lam).map(|p| p.sample(rng) as u64).unwrap_or(0)
        } else {
            0
        };
        for _ in 0..n {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let r = self.model.tail_mass_inverse(u * self.big_rate);
            let th = self.direction(rng);
            x[0] += r * th[0];
            x[1] += r * th[1];
        }
        x
    }
}

/// Exact sampler for one-dimensional stable laws (Chambers–Mallows–Stuck).
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    alpha: f64,
    sigma: f64,
    skew: f64,
}

impl StableSampler {
    /// Available for d = 1 stable models with α ≠ 1, or α = 1 and symmetric weights.
    pub fn for_model(model: &LevyModel) -> Option<StableSampler> {
        if model.dim() != 1 || !matches!(model.kind(), ModelKind::Stable) {
            return None;
        }
        let c = model.stable_coefficient()?;
        let Angular::Line { plus, minus } = *model.angular() else {
            return None;
        };
        let alpha = model.order();
        if alpha == 1.0 {
            if plus != minus {
                return None;
            }
            return Some(StableSampler { alpha, sigma: c * (plus + minus) * FRAC_PI_2, skew: 0.0 });
        }
        let sig_a = -gamma(-alpha) * (PI * alpha / 2.0).cos() * c * (plus + minus);
        Some(StableSampler { alpha, sigma: sig_a.powf(1.0 / alpha), skew: (plus - minus) / (plus + minus) })
    }

    /// Scale σ with E e^{iuX_1} = exp(−σ^α|u|^α(1 − iβ sgn(u) tan(πα/2))).
    pub fn scale(&self) -> f64 {
        self.sigma
    }

    pub fn skewness(&self) -> f64 {
        self.skew
    }

    pub fn sample(&self, t: f64, rng: &mut Stream) -> f64 {
        let v = PI * (rng.gen::<f64>() - 0.5);
        if self.alpha == 1.0 {
            return t * self.sigma * v.tan();
        }
        let w: f64 = rng.sample(Exp1);
        let a = self.alpha;
        let tan = (PI * a / 2.0).tan();
        let b = (self.skew * tan).atan() / a;
        let s = (1.0 + self.skew * self.skew * tan * tan).powf(1.0 / (2.0 * a));
        let x = s * (a * (v + b)).sin() / v.cos().powf(1.0 / a) * ((v - a * (v + b)).cos() / w).powf((1.0 - a) / a);
        t.powf(1.0 / a) * self.sigma * x
    }
}

/// Increment source used by the Monte Carlo oracles: exact when a closed-form
/// sampler exists, jump-diffusion otherwise.
#[derive(Debug, Clone)]
pub enum IncrementSource {
    Exact(StableSampler),
    JumpDiffusion(IncrementSampler),
}

impl IncrementSource {
    pub fn for_model(model: &LevyModel, eps: f64) -> Result<IncrementSource> {
        match StableSampler::for_model(model) {
            Some(s) => Ok(IncrementSource::Exact(s)),
            None => Ok(IncrementSource::JumpDiffusion(IncrementSampler::new(model, eps)?)),
        }
    }

    pub fn sample(&self, t: f64, rng: &mut Stream) -> [f64; 2] {
        match self {
            IncrementSource::Exact(s) => [s.sample(t, rng), 0.0],
            IncrementSource::JumpDiffusion(j) => j.sample(t, rng),
        }
    }
}

/// One jump-diffusion increment Z_t (second coordinate is 0 when d = 1).
pub fn sample_increment(model: &LevyModel, t: f64, eps: f64, rng: &mut Stream) -> Result<[f64; 2]> {
    crate::error::check_positive("t", t)?;
    Ok(IncrementSampler::new(model, eps)?.sample(t, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::stats::{ks_two_sample, mean_stderr};
    use crate::rng::stream;

    fn stable1(alpha: f64, plus: f64, minus: f64) -> LevyModel {
        LevyModel::stable(1, alpha, Angular::Line { plus, minus }).unwrap()
    }

    #[test]
    fn symmetric_increments_are_centered() {
        let m = stable1(1.5, 1.0, 1.0);
        let s = IncrementSampler::new(&m, 1e-3).unwrap();
        assert_eq!(s.drift(), [0.0, 0.0]);
        let mut rng = stream(11, 0);
        let v: Vec<f64> = (0..100_000).map(|_| s.sample(1e-7, &mut rng)[0]).collect();
        let (mean, se) = mean_stderr(&v);
        assert!(mean.abs() <= 3.0 * se, "{mean} {se}");
    }

    #[test]
    fn jump_diffusion_matches_exact_stable() {
        let m = stable1(0.5, 1.0, 1.0);
        let jd = IncrementSampler::new(&m, 1e-3).unwrap();
        let ex = StableSampler::for_model(&m).unwrap();
        let mut r1 = stream(5, 1);
        let mut r2 = stream(5, 2);
        let a: Vec<f64> = (0..100_000).map(|_| jd.sample(1.0, &mut r1)[0]).collect();
        let b: Vec<f64> = (0..100_000).map(|_| ex.sample(1.0, &mut r2)).collect();
        let d = ks_two_sample(&a, &b);
        assert!(d < 0.02, "KS {d}");
    }

    #[test]
    fn skewed_jump_diffusion_matches_exact() {
        let m = stable1(1.5, 1.0, 0.3);
        let jd = IncrementSampler::new(&m, 1e-2).unwrap();
        let ex = StableSampler::for_model(&m).unwrap();
        let mut r1 = stream(9, 1);
        let mut r2 = stream(9, 2);
        let a: Vec<f64> = (0..40_000).map(|_| jd.sample(0.5, &mut r1)[0]).collect();
        let b: Vec<f64> = (0..40_000).map(|_| ex.sample(0.5, &mut r2)).collect();
        assert!(ks_two_sample(&a, &b) < 0.02);
    }

    #[test]
    fn small_jump_variance_matches_quadrature() {
        let m = stable1(1.2, 1.0, 1.0);
        let eps = 1e-3;
        let s = IncrementSampler::new(&m, eps).unwrap();
        // ∫_{|y|≤eps} y² |y|^{−2.2} dy = 2 eps^{0.8}/0.8
        let exact = 2.0 * eps.powf(0.8) / 0.8;
        assert!((s.small_jump_variance() / exact - 1.0).abs() < 1e-8);
        let t = 2.0;
        let mut rng = stream(3, 0);
        let v: Vec<f64> = (0..100_000).map(|_| s.sample_small(t, &mut rng)[0].powi(2)).collect();
        let (mean, _) = mean_stderr(&v);
        assert!((mean / (t * exact) - 1.0).abs() < 0.05);
    }

    #[test]
    fn cauchy_sampler_quartiles() {
        let m = stable1(1.0, 1.0, 1.0);
        let ex = StableSampler::for_model(&m).unwrap();
        assert!((ex.scale() - PI).abs() < 1e-14);
        let mut rng = stream(1, 0);
        let mut v: Vec<f64> = (0..100_000).map(|_| ex.sample(1.0, &mut rng)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q3 = v[75_000];
        assert!((q3 / PI - 1.0).abs() < 0.03, "{q3}");
    }

    #[test]
    fn two_dimensional_jumps() {
        let m = LevyModel::stable(2, 0.8, Angular::uniform(2)).unwrap();
        let s = IncrementSampler::new(&m, 1e-2).unwrap();
        let mut rng = stream(2, 0);
        let v: Vec<[f64; 2]> = (0..2000).map(|_| s.sample(0.1, &mut rng)).collect();
        assert!(v.iter().all(|p| p[0].is_finite() && p[1].is_finite()));
        assert!(v.iter().any(|p| p[1] != 0.0));
    }

    #[test]
    fn rejects_bad_cutoff() {
        let m = stable1(0.5, 1.0, 1.0);
        assert!(IncrementSampler::new(&m, 0.0).is_err());
        assert!(IncrementSampler::new(&m, 2.0).is_err());
        let mut rng = stream(0, 0);
        assert!(sample_increment(&m, -1.0, 1e-3, &mut rng).is_err());
    }
}
