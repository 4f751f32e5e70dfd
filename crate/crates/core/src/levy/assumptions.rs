//! Checks of the standing assumptions on a measure paired with a scaling function.

use serde::Serialize;

use super::{Cutoff, LevyModel, PANELS_PER_DECADE};
use crate::error::{Error, Result};
use crate::math::{interp::logspace, quad, stats};
use crate::scaling::ScalingFunction;

/// Outcome of one clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// clause checked through its directional second-moment consequence
    ProxyPass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn ok(self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

/// Sampling grids and thresholds.
#[derive(Debug, Clone)]
pub struct AssumptionGrids {
    /// dilation factors R
    pub scales: Vec<f64>,
    /// radii r for the tail-ratio clause
    pub radii: Vec<f64>,
    /// number of directions on S¹ (d = 2)
    pub directions: usize,
    /// allowed shell-mean residual at order 1
    pub symmetry_tol: f64,
    /// allowed max/min spread of the R- and r-sweeps
    pub spread_bound: f64,
}

impl Default for AssumptionGrids {
    fn default() -> Self {
        AssumptionGrids {
            scales: logspace(1e-3, 1e3, 25),
            radii: logspace(1e-4, 1e4, 33),
            directions: 64,
            symmetry_tol: 1e-10,
            spread_bound: 100.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClauseVerdicts {
    pub nondegeneracy: Verdict,
    pub shell_symmetry: Verdict,
    pub scaled_moments: Verdict,
    pub tail_ratio: Verdict,
}

impl ClauseVerdicts {
    pub fn all_ok(&self) -> bool {
        [self.nondegeneracy, self.shell_symmetry, self.scaled_moments, self.tail_ratio]
            .iter()
            .all(|v| v.ok())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    /// min over directions and dilations of ∫_{|y|≤1}|ξ·y|² ν̃_R(dy)
    pub directional_c0: f64,
    /// sup over dilations of the scaled moment sum
    pub moment_n0: f64,
    /// max/min of the scaled moment sum over dilations
    pub moment_spread: f64,
    /// sup over radii of ∫₀¹ s ς(rs)/ς(r) ds
    pub tail_c0: f64,
    pub tail_spread: f64,
    /// |∫_{r<|y|<R} y ν(dy)| over the largest sampled shell (order 1 only)
    pub alpha1_symmetry_residual: Option<f64>,
    /// sup over dilations of the case-split moment used by the symbol bounds
    pub symbol_moment_n2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub verdicts: ClauseVerdicts,
}

/// (I1, I2) = (∫_{|y|≤1}|y|^{α₁} ν̃_R, ∫_{|y|>1}|y|^{α₂} ν̃_R) with ν̃_R = w(R)ν_R.
pub fn scaled_moments(model: &LevyModel, sf: &ScalingFunction, r: f64) -> Result<(f64, f64)> {
    crate::error::check_positive("R", r)?;
    let scaled = model.rescaled(r, sf.w(r)?);
    let m = model.moments();
    let s = scaled.angular().total();
    let i1 = scaled
        .radial_integral(0.0, 1.0, PANELS_PER_DECADE, |y| y.powf(m.alpha1))
        .map_err(|_| Error::Parameter(format!("small-jump moment diverges: alpha1 = {} is too small", m.alpha1)))?;
    let i2 = scaled
        .radial_integral(1.0, f64::INFINITY, PANELS_PER_DECADE, |y| y.powf(m.alpha2))
        .map_err(|_| Error::Parameter(format!("large-jump moment diverges: alpha2 = {} is too large", m.alpha2)))?;
    Ok((s * i1, s * i2))
}

/// ∫₀¹ s ς(rs)/ς(r) ds.
pub fn tail_ratio_integral(model: &LevyModel, r: f64) -> Result<f64> {
    let base = model.tail_mass(r)?;
    if !(base > 0.0) {
        return Err(Error::Model(format!("tail mass vanishes at r={r}")));
    }
    let f = |s: f64| s * model.tail_mass(r * s).unwrap_or(f64::NAN) / base;
    let lo = 1e-10;
    let body = quad::log_panels(quad::gl8(), lo, 1.0, 8.0, f);
    let below = quad::power_tail_below(f, lo).ok_or(Error::Integration { achieved: f64::INFINITY })?;
    Ok(body + below)
}

fn directions(dim: usize, n: usize) -> Vec<[f64; 2]> {
    if dim == 1 {
        vec![[1.0, 0.0]]
    } else {
        (0..n)
            .map(|k| {
                let th = std::f64::consts::PI * k as f64 / n as f64;
                [th.cos(), th.sin()]
            })
            .collect()
    }
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Evaluates every clause on the sampling grids.
pub fn check_assumption_a(model: &LevyModel, sf: &ScalingFunction, grids: &AssumptionGrids) -> Result<AssumptionReport> {
    let dirs = directions(model.dim(), grids.directions);
    let ang_min = dirs
        .iter()
        .map(|e| model.angular().directional_second_moment(*e))
        .fold(f64::INFINITY, f64::min);

    let mut c0 = f64::INFINITY;
    let mut sums = Vec::with_capacity(grids.scales.len());
    let mut n2 = 0f64;
    for &r in &grids.scales {
        let scaled = model.rescaled(r, sf.w(r)?);
        let second = scaled.radial_integral(0.0, 1.0, PANELS_PER_DECADE, |y| y * y)?;
        c0 = c0.min(ang_min * second);
        let (i1, i2) = scaled_moments(model, sf, r)?;
        sums.push(i1 + i2);
        let s = scaled.angular().total();
        let n2_r = match model.cutoff() {
            Cutoff::NoCompensation => {
                scaled.radial_integral(0.0, 1.0, PANELS_PER_DECADE, |y| y)?
                    + scaled.radial_integral(1.0, f64::INFINITY, PANELS_PER_DECADE, |_| 1.0)?
            }
            Cutoff::UnitBall => {
                second + scaled.radial_integral(1.0, f64::INFINITY, PANELS_PER_DECADE, |_| 1.0)?
            }
            Cutoff::All => {
                second + scaled.radial_integral(1.0, f64::INFINITY, PANELS_PER_DECADE, |y| y)?
            }
        };
        n2 = n2.max(s * n2_r);
    }
    let moment_n0 = sums.iter().cloned().fold(0.0, f64::max);
    let moment_spread = spread(&sums);

    let mut tails = Vec::with_capacity(grids.radii.len());
    for &r in &grids.radii {
        tails.push(tail_ratio_integral(model, r)?);
    }
    let tail_c0 = tails.iter().cloned().fold(0.0, f64::max);
    let tail_spread = spread(&tails);

    let residual = if model.order() == 1.0 {
        let m1 = model.angular().first_moment();
        let norm = (m1[0] * m1[0] + m1[1] * m1[1]).sqrt();
        let lo = grids.scales[0];
        let hi = *grids.scales.last().unwrap();
        let shell = model.radial_integral(lo, hi, PANELS_PER_DECADE, |y| y)?;
        Some(norm * shell)
    } else {
        None
    };

    let all = [c0, moment_n0, moment_spread, tail_c0, tail_spread, n2];
    if all.iter().any(|v| v.is_nan()) || residual.is_some_and(|v| v.is_nan()) {
        return Err(Error::Model("assumption check produced NaN".into()));
    }
    let finite_and_flat = |v: f64, s: f64| v.is_finite() && s.is_finite() && s <= grids.spread_bound;
    let verdicts = ClauseVerdicts {
        nondegeneracy: if c0 > 0.0 && c0.is_finite() { Verdict::ProxyPass } else { Verdict::Fail },
        shell_symmetry: match residual {
            None => Verdict::NotApplicable,
            Some(r) if r <= grids.symmetry_tol => Verdict::Pass,
            Some(_) => Verdict::Fail,
        },
        scaled_moments: if finite_and_flat(moment_n0, moment_spread) { Verdict::Pass } else { Verdict::Fail },
        tail_ratio: if finite_and_flat(tail_c0, tail_spread) { Verdict::Pass } else { Verdict::Fail },
    };
    let m = model.moments();
    Ok(AssumptionReport {
        directional_c0: c0,
        moment_n0,
        moment_spread,
        tail_c0,
        tail_spread,
        alpha1_symmetry_residual: residual,
        symbol_moment_n2: n2,
        alpha1: m.alpha1,
        alpha2: m.alpha2,
        verdicts,
    })
}

/// Order estimate from the small-radius decay of ς.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub value: f64,
    /// spread of local slopes across the fitting window
    pub interval: (f64, f64),
    /// false when the local slopes disagree (no single exponent)
    pub converged: bool,
    /// small-radius index of the paired scaling function, if supplied
    pub scaling_index: Option<f64>,
    /// true when `scaling_index` disagrees with `value`
    pub mismatch: bool,
}

/// Regression slope of log ς(r) against −log r on r ∈ [1e-7, 1e-4].
pub fn order_estimate(model: &LevyModel, sf: Option<&ScalingFunction>) -> Result<OrderEstimate> {
    let rs = logspace(1e-7, 1e-4, 31);
    let x: Vec<f64> = rs.iter().map(|r| -r.ln()).collect();
    let y: Vec<f64> = rs.iter().map(|&r| model.tail_mass(r).map(f64::ln)).collect::<Result<_>>()?;
    let fit = stats::linear_fit(&x, &y).ok_or_else(|| Error::Estimation("order regression failed".into()))?;
    let local: Vec<f64> = x.windows(2).zip(y.windows(2)).map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0])).collect();
    let lo = local.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = local.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 0.05;
    let scaling_index = sf.map(|s| s.small_scale_index());
    let mismatch = scaling_index.is_some_and(|a| (a - fit.slope).abs() > tol);
    Ok(OrderEstimate {
        value: fit.slope,
        interval: (lo, hi),
        converged: hi - lo <= tol,
        scaling_index,
        mismatch,
    })
}

/// min and max of ς(r)·w(r) over `radii`.
pub fn tail_scaling_bounds(model: &LevyModel, sf: &ScalingFunction, radii: &[f64]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0f64;
    for &r in radii {
        let v = model.tail_mass(r)? * sf.w(r)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// ∫_{r_min<|y|≤1} |y|^a w(|y|)^b ν(dy). With `r_min = 0` the part below the
/// radial truncation is completed by its power-law tail; a divergent tail is an error.
pub fn weighted_small_jump_integral(
    model: &LevyModel,
    sf: &ScalingFunction,
    a: f64,
    b: f64,
    r_min: f64,
    per_decade: f64,
) -> Result<f64> {
    let f = |y: f64| y.powf(a) * sf.w_unchecked(y).powf(b) * model.radial_measure(y);
    let lo = if r_min > 0.0 { r_min } else { super::R_MIN };
    let mut v = quad::log_panels(quad::gl8(), lo, 1.0, per_decade, f);
    if r_min <= 0.0 {
        v += quad::power_tail_below(f, lo).ok_or(Error::Integration { achieved: f64::INFINITY })?;
    }
    Ok(model.angular().total() * v)
}
