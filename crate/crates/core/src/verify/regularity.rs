//! Space and time regularity of the Cauchy problem ∂ₜu = L^ν u − λu + f, u(0) = 0.

use rayon::prelude::*;

use super::report::CheckRecord;
use crate::error::{domain, Error, Result};
use crate::levy::LevyModel;
use crate::lp::norms::{band_weights, besov_from_bands};
use crate::lp::{DyadicBank, GridFunction, Lattice, TrigPoly};
use crate::math::stats::linear_fit;
use crate::scaling::ScalingFunction;
use crate::solver::{solve_spectral, Forcing};
use crate::symbol::SymbolGrid;

/// Largest relative move of a constant under M → 2M that still counts as stable.
pub const REFINEMENT_TOLERANCE: f64 = 0.25;
/// Allowed shortfall of a fitted time exponent below 1 − κ.
pub const SLOPE_TOLERANCE: f64 = 0.1;

/// The problem shared by the regularity checks.
#[derive(Debug, Clone)]
pub struct CauchyCase<'a> {
    pub model: &'a LevyModel,
    pub sf: &'a ScalingFunction,
    pub lattice: &'a Lattice,
    pub base: f64,
    pub beta: f64,
    pub lambda: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl CauchyCase<'_> {
    /// λ^{−1} ∧ T.
    pub fn horizon(&self) -> f64 {
        if self.lambda > 0.0 {
            (1.0 / self.lambda).min(self.t_end)
        } else {
            self.t_end
        }
    }
}

/// Per-lattice data: symbol, bank and the weight vectors for the norms in use.
struct Frame {
    grid: SymbolGrid,
    bank: DyadicBank,
}

impl Frame {
    fn new(model: &LevyModel, lattice: &Lattice, base: f64) -> Result<Frame> {
        Ok(Frame { grid: SymbolGrid::compute(model, lattice)?, bank: DyadicBank::new(base, lattice, None)? })
    }
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b - a).abs() / a.abs().max(b.abs())
    }
}

/// (sup_t |u(t)|_{β,∞}/((λ^{−1}∧T)|f|_{β,∞}), sup_t |u(t)|_{1+β,∞}/|f|_{β,∞}) maximised over the family.
fn space_constants(case: &CauchyCase, frame: &Frame, family: &[TrigPoly]) -> Result<(f64, f64, usize)> {
    let wb = band_weights(&frame.bank, case.sf, case.beta);
    let w1 = band_weights(&frame.bank, case.sf, 1.0 + case.beta);
    let per: Vec<Option<(f64, f64)>> = family
        .par_iter()
        .map(|p| {
            let f = p.to_grid(frame.grid.lattice());
            let fb = besov_from_bands(&frame.bank.band_sup_norms(&f)?, &wb);
            if fb == 0.0 {
                return Ok(None);
            }
            let sol = solve_spectral(&Forcing::Constant(f), &frame.grid, case.lambda, case.t_end, case.steps)?;
            let (mut a, mut b) = (0f64, 0f64);
            for u in &sol.states {
                let bands = frame.bank.band_sup_norms(u)?;
                a = a.max(besov_from_bands(&bands, &wb));
                b = b.max(besov_from_bands(&bands, &w1));
            }
            Ok(Some((a / (case.horizon() * fb), b / fb)))
        })
        .collect::<Result<_>>()?;
    let used: Vec<(f64, f64)> = per.into_iter().flatten().collect();
    if used.is_empty() {
        return Err(Error::Input("every family member has |f|_{β,∞} = 0".into()));
    }
    let c5 = used.iter().map(|x| x.0).fold(0.0, f64::max);
    let c1 = used.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok((c5, c1, family.len() - used.len()))
}

/// Sup-in-time and gain-of-one-order estimates, each measured on the lattice and its refinement.
pub fn verify_regularity(case: &CauchyCase, family: &[TrigPoly]) -> Result<Vec<CheckRecord>> {
    let fine = case.lattice.refined()?;
    let frames = [Frame::new(case.model, case.lattice, case.base)?, Frame::new(case.model, &fine, case.base)?];
    let (a5, a1, skipped) = space_constants(case, &frames[0], family)?;
    let (b5, b1, _) = space_constants(case, &frames[1], family)?;
    let mk = |name: &str, ineq: &str, c: f64, cf: f64| {
        let mv = rel_change(c, cf);
        let mut r = CheckRecord::new(name, ineq, REFINEMENT_TOLERANCE)
            .constant("C", c)
            .constant("C_refined", cf)
            .constant("refinement_change", mv)
            .require(c.is_finite() && cf.is_finite(), "constant is not finite")
            .require(mv <= REFINEMENT_TOLERANCE, format!("constant moved by {mv:.3} under refinement"));
        if skipped > 0 {
            r = r.note(format!("{skipped} members with |f|_(β,∞) = 0 skipped"));
        }
        r
    };
    Ok(vec![
        mk("regularity_sup", "|u|_(β,∞) ≤ C(λ^-1 ∧ T)|f|_(β,∞)", a5, b5),
        mk("regularity_gain", "|u|_(1+β,∞) ≤ C|f|_(β,∞)", a1, b1),
    ])
}

/// Dyadic gaps T/2, …, T/64.
pub fn dyadic_gaps(t_end: f64) -> Vec<f64> {
    (1..=6).map(|k| t_end / f64::from(1u32 << k)).collect()
}

/// sup over members and anchors s ∈ {0, T − g} of |u(s+g) − u(s)|_{κ+β,∞}/|f|_{β,∞}, per gap.
fn gap_constants(case: &CauchyCase, frame: &Frame, family: &[TrigPoly], kappa: f64, gaps: &[usize]) -> Result<Vec<f64>> {
    let wb = band_weights(&frame.bank, case.sf, case.beta);
    let wk = band_weights(&frame.bank, case.sf, kappa + case.beta);
    let k = case.steps;
    let per: Vec<Vec<f64>> = family
        .par_iter()
        .map(|p| {
            let f = p.to_grid(frame.grid.lattice());
            let fb = besov_from_bands(&frame.bank.band_sup_norms(&f)?, &wb);
            if fb == 0.0 {
                return Ok(vec![0.0; gaps.len()]);
            }
            let sol = solve_spectral(&Forcing::Constant(f), &frame.grid, case.lambda, case.t_end, k)?;
            gaps.iter()
                .map(|&g| {
                    let mut best = 0f64;
                    for s in [0, k - g] {
                        let d: GridFunction = sol.states[s + g].sub(&sol.states[s]);
                        best = best.max(besov_from_bands(&frame.bank.band_sup_norms(&d)?, &wk));
                    }
                    Ok(best / fb)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok((0..gaps.len()).map(|i| per.iter().map(|v| v[i]).fold(0.0, f64::max)).collect())
}

/// Hölder-in-time estimate with exponent 1 − κ, one record per κ.
pub fn verify_time_regularity(case: &CauchyCase, family: &[TrigPoly], kappas: &[f64]) -> Result<Vec<CheckRecord>> {
    if case.steps % 64 != 0 {
        return Err(domain(format!("time steps must be a multiple of 64 to hit the gaps T/2..T/64, got {}", case.steps)));
    }
    let frame = Frame::new(case.model, case.lattice, case.base)?;
    let gaps = dyadic_gaps(case.t_end);
    let idx: Vec<usize> = (1..=6).map(|k| case.steps >> k).collect();
    let mut out = Vec::new();
    for &kappa in kappas {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(domain(format!("κ must lie in [0,1], got {kappa}")));
        }
        let c = gap_constants(case, &frame, family, kappa, &idx)?;
        let floor = 10.0 * f64::EPSILON * c.iter().cloned().fold(0.0, f64::max) * case.lattice.len() as f64;
        let kept: Vec<(f64, f64)> = gaps.iter().zip(&c).filter(|(_, v)| **v > floor).map(|(g, v)| (*g, *v)).collect();
        let want = 1.0 - kappa - SLOPE_TOLERANCE;
        let (lx, ly): (Vec<f64>, Vec<f64>) = kept.iter().map(|(g, v)| (g.ln(), v.ln())).unzip();
        let slope = linear_fit(&lx, &ly).map(|f| f.slope).unwrap_or(f64::NAN);
        let constant = kept.iter().map(|(g, v)| v / g.powf(1.0 - kappa)).fold(0.0, f64::max);
        let mut r = CheckRecord::new(
            &format!("time_regularity_k{kappa}"),
            "|u(t)-u(s)|_(κ+β,∞) ≤ C|t-s|^(1-κ)|f|_(β,∞)",
            SLOPE_TOLERANCE,
        )
        .exponent("slope", slope)
        .exponent("required", want)
        .constant("C", constant)
        .series("gap_constant", gaps.iter().zip(&c).map(|(g, v)| [*g, *v]).collect())
        .require(slope >= want, format!("fitted exponent {slope:.3} below {want:.3}"))
        .require(constant.is_finite(), "constant is not finite")
        .note("anchors s ∈ {0, T-g}");
        if kept.len() < gaps.len() {
            r = r.note(format!("{} gaps below the noise floor excluded", gaps.len() - kept.len()));
        }
        out.push(r);
    }
    Ok(out)
}
