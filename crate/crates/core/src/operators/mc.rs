//! Monte Carlo oracles: subordination integrals of E φ(x + Z_t) over log-spaced times.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{subordination_constant, Subordination};
use crate::error::{check_positive, domain, Error, Result};
use crate::levy::{IncrementSource, LevyModel};
use crate::lp::{GridFunction, Lattice, TrigPoly};
use crate::math::quad::gl8;
use crate::math::special::upper_gamma_asymptotic;
use crate::rng::stream;
use crate::symbol::symbol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub paths: usize,
    pub seed: u64,
    /// small-jump threshold for the jump-diffusion sampler
    pub eps: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// Gauss panels per decade of t
    pub per_decade: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { paths: 100_000, seed: 0, eps: 1e-3, t_min: 1e-6, t_max: 50.0, per_decade: 2.0 }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(Error::Parameter("at least two Monte Carlo paths are needed".into()));
        }
        check_positive("t_min", self.t_min)?;
        if !(self.t_max > self.t_min) || !(self.per_decade > 0.0) {
            return Err(Error::Parameter("time rule needs t_min < t_max and a positive panel density".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeEstimate {
    pub x: [f64; 2],
    pub value: Complex64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McField {
    pub estimate: GridFunction,
    pub probes: Vec<ProbeEstimate>,
    pub paths: usize,
}

/// `count` lattice points spread evenly over the box (along the diagonal when d = 2).
pub fn probe_points(lattice: &Lattice, count: usize) -> Vec<[f64; 2]> {
    let m = lattice.points();
    let h = lattice.spacing();
    let x0 = -0.5 * lattice.box_len();
    (0..count)
        .map(|i| {
            let n = (i * m) / count.max(1) + m / (2 * count.max(1));
            let x = x0 + h * (n % m) as f64;
            if lattice.dim() == 1 {
                [x, 0.0]
            } else {
                [x, x0 + h * ((n + m / 3) % m) as f64]
            }
        })
        .collect()
}

struct TimeRule {
    t: Vec<f64>,
    w: Vec<f64>,
}

/// Gauss panels in ln t on [t_min, t_max]; weights carry the kernel and the Jacobian.
fn log_rule(cfg: &McConfig, kernel: impl Fn(f64) -> f64) -> TimeRule {
    let (la, lb) = (cfg.t_min.ln(), cfg.t_max.ln());
    let panels = (((lb - la) / std::f64::consts::LN_10) * cfg.per_decade).ceil().max(1.0) as usize;
    let h = (lb - la) / panels as f64;
    let rule = gl8();
    let mut t = Vec::new();
    let mut w = Vec::new();
    for p in 0..panels {
        let mid = la + h * (p as f64 + 0.5);
        for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
            let s = (mid + 0.5 * h * x).exp();
            t.push(s);
            w.push(0.5 * h * wx * s * kernel(s));
        }
    }
    TimeRule { t, w }
}

struct Accum {
    modes: Vec<Complex64>,
    sum: Vec<Complex64>,
    sq: Vec<f64>,
}

struct Problem<'a> {
    freqs: Vec<[f64; 2]>,
    /// probe × mode amplitudes c_k e^{i2πξ_k·x}
    probe_amps: Vec<Vec<Complex64>>,
    /// per-mode affine map applied to the path sums: a·S + b
    scale: f64,
    shift: Vec<Complex64>,
    source: &'a IncrementSource,
    rule: TimeRule,
}

impl Problem<'_> {
    fn chunk(&self, seed: u64, first: usize, count: usize) -> Accum {
        let nm = self.freqs.len();
        let np = self.probe_amps.len();
        let mut acc = Accum { modes: vec![Complex64::new(0.0, 0.0); nm], sum: vec![Complex64::new(0.0, 0.0); np], sq: vec![0.0; np] };
        let mut s = vec![Complex64::new(0.0, 0.0); nm];
        for p in first..first + count {
            let mut rng = stream(seed, p as u64);
            s.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            let mut z = [0.0, 0.0];
            let mut prev = 0.0;
            for (t, w) in self.rule.t.iter().zip(&self.rule.w) {
                let dz = self.source.sample(t - prev, &mut rng);
                prev = *t;
                z[0] += dz[0];
                z[1] += dz[1];
                for (k, f) in self.freqs.iter().enumerate() {
                    s[k] += w * Complex64::from_polar(1.0, 2.0 * PI * (f[0] * z[0] + f[1] * z[1]));
                }
            }
            for k in 0..nm {
                s[k] = self.scale * s[k] + self.shift[k];
                acc.modes[k] += s[k];
            }
            for (j, amps) in self.probe_amps.iter().enumerate() {
                let y: Complex64 = amps.iter().zip(&s).map(|(a, v)| a * v).sum();
                acc.sum[j] += y;
                acc.sq[j] += y.norm_sqr();
            }
        }
        acc
    }

    fn run(&self, u: &GridFunction, trig: &TrigPoly, probes: &[[f64; 2]], cfg: &McConfig) -> McField {
        const CHUNK: usize = 1000;
        let chunks = cfg.paths.div_ceil(CHUNK);
        let parts: Vec<Accum> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let first = c * CHUNK;
                self.chunk(cfg.seed, first, CHUNK.min(cfg.paths - first))
            })
            .collect();
        let nm = self.freqs.len();
        let np = probes.len();
        let mut tot = Accum { modes: vec![Complex64::new(0.0, 0.0); nm], sum: vec![Complex64::new(0.0, 0.0); np], sq: vec![0.0; np] };
        for a in parts {
            tot.modes.iter_mut().zip(&a.modes).for_each(|(x, y)| *x += y);
            tot.sum.iter_mut().zip(&a.sum).for_each(|(x, y)| *x += y);
            tot.sq.iter_mut().zip(&a.sq).for_each(|(x, y)| *x += y);
        }
        let n = cfg.paths as f64;
        let modes: Vec<([i64; 2], Complex64)> =
            trig.modes().iter().zip(&tot.modes).map(|((k, c), m)| (*k, c * m / n)).collect();
        let estimate = TrigPoly::new(u.lattice().dim(), trig.box_len(), modes).to_grid(u.lattice());
        let probes = probes
            .iter()
            .enumerate()
            .map(|(j, x)| {
                let mean = tot.sum[j] / n;
                let var = ((tot.sq[j] / n - mean.norm_sqr()) * n / (n - 1.0)).max(0.0);
                ProbeEstimate { x: *x, value: mean, stderr: (var / n).sqrt() }
            })
            .collect();
        McField { estimate, probes, paths: cfg.paths }
    }
}

fn prepare(u: &GridFunction, model: &LevyModel, probes: &[[f64; 2]]) -> Result<(TrigPoly, Vec<[f64; 2]>, Vec<Vec<Complex64>>)> {
    if model.dim() != u.lattice().dim() {
        return Err(domain("model and function dimensions differ"));
    }
    let full = u.to_trig(0.0);
    let scale = full.modes().iter().fold(0f64, |m, (_, c)| m.max(c.norm()));
    let kept: Vec<([i64; 2], Complex64)> = full.modes().iter().copied().filter(|(_, c)| c.norm() > 1e-14 * scale).collect();
    let trig = TrigPoly::new(u.lattice().dim(), full.box_len(), kept);
    let freqs: Vec<[f64; 2]> = (0..trig.modes().len()).map(|i| trig.frequency(i)).collect();
    let amps = probes
        .iter()
        .map(|x| {
            trig.modes()
                .iter()
                .zip(&freqs)
                .map(|((_, c), f)| c * Complex64::from_polar(1.0, 2.0 * PI * (f[0] * x[0] + f[1] * x[1])))
                .collect()
        })
        .collect();
    Ok((trig, freqs, amps))
}

/// Estimate of L^{ν,κ}u through C ∫₀^∞ t^{−1−κ} E[u(x + Z_t^{ν̄}) − u(x)] dt, κ ∈ (0, 1).
pub fn probabilistic_fractional(
    u: &GridFunction,
    model: &LevyModel,
    kappa: f64,
    probes: &[[f64; 2]],
    cfg: &McConfig,
) -> Result<McField> {
    cfg.validate()?;
    let c = 1.0 / subordination_constant(kappa, Subordination::Fractional)?;
    let bar = model.symmetrize();
    let source = IncrementSource::for_model(&bar, cfg.eps)?;
    let (trig, freqs, probe_amps) = prepare(u, model, probes)?;
    let rule = log_rule(cfg, |t| t.powf(-1.0 - kappa));
    let total_w: f64 = rule.w.iter().sum();
    // E[u(x+Z_t) − u(x)] ≈ t L^{ν̄}u(x) below t_min; → (mean − u(x)) above t_max
    let shift = freqs
        .iter()
        .map(|f| {
            let small = symbol(&bar, *f)? * (cfg.t_min.powf(1.0 - kappa) / (1.0 - kappa));
            let large = if f[0] == 0.0 && f[1] == 0.0 { 0.0 } else { -cfg.t_max.powf(-kappa) / kappa };
            Ok(c * (small + large - total_w))
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let problem = Problem { freqs, probe_amps, scale: c, shift, source: &source, rule };
    let out = problem.run(u, &trig, probes, cfg);
    finite(out)
}

/// Estimate of (aI − L^ν)^{−κ}u through C′ ∫₀^∞ t^{κ−1} e^{−at} E u(x + Z_t) dt, where Z is
/// driven by ν̄ for κ < 1 and by ν itself at κ = 1.
pub fn probabilistic_resolvent_power(
    u: &GridFunction,
    model: &LevyModel,
    a: f64,
    kappa: f64,
    probes: &[[f64; 2]],
    cfg: &McConfig,
) -> Result<McField> {
    cfg.validate()?;
    check_positive("a", a)?;
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(domain(format!("resolvent order must lie in (0,1], got {kappa}")));
    }
    let (c, driver) = if kappa == 1.0 {
        (1.0, model.clone())
    } else {
        (1.0 / subordination_constant(kappa, Subordination::Resolvent)?, model.symmetrize())
    };
    let source = IncrementSource::for_model(&driver, cfg.eps)?;
    let (trig, freqs, probe_amps) = prepare(u, model, probes)?;
    let rule = log_rule(cfg, |t| t.powf(kappa - 1.0) * (-a * t).exp());
    let small = cfg.t_min.powf(kappa) / kappa - a * cfg.t_min.powf(kappa + 1.0) / (kappa + 1.0);
    let large = a.powf(-kappa) * upper_gamma_asymptotic(kappa, a * cfg.t_max);
    let shift = freqs
        .iter()
        .map(|f| {
            let tail = if f[0] == 0.0 && f[1] == 0.0 { large } else { 0.0 };
            Complex64::new(c * (small + tail), 0.0)
        })
        .collect();
    let problem = Problem { freqs, probe_amps, scale: c, shift, source: &source, rule };
    finite(problem.run(u, &trig, probes, cfg))
}

/// (aI − L^ν)^{−1}u = ∫₀^∞ e^{−at} E u(x + Z_t^ν) dt.
pub fn resolvent_via_expectation(u: &GridFunction, model: &LevyModel, a: f64, probes: &[[f64; 2]], cfg: &McConfig) -> Result<McField> {
    probabilistic_resolvent_power(u, model, a, 1.0, probes, cfg)
}

fn finite(f: McField) -> Result<McField> {
    if f.probes.iter().all(|p| p.stderr.is_finite() && p.value.re.is_finite() && p.value.im.is_finite()) {
        Ok(f)
    } else {
        Err(Error::Estimation("Monte Carlo variance is not finite; increase the path count".into()))
    }
}
