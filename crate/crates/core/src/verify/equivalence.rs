//! Ratios between the Hölder, Besov and operator-based norms over a test family.

use rayon::prelude::*;
use serde::Serialize;

use super::regularity::REFINEMENT_TOLERANCE;
use super::report::CheckRecord;
use crate::error::{domain, Result};
use crate::levy::LevyModel;
use crate::lp::norms::{band_weights, besov_from_bands};
use crate::lp::{holder_norm, DyadicBank, GridFunction, Lattice, TrigPoly};
use crate::operators::{apply_fractional, apply_resolvent_full, apply_resolvent_power};
use crate::scaling::{Integrability, ScalingFunction};
use crate::symbol::SymbolGrid;

/// Default bound on max/min of a ratio over the family.
pub const DEFAULT_SPREAD_BOUND: f64 = 1e3;

/// |u|₀ + |L^{μ,κ}u|_{β,∞}.
pub fn generator_norm(u: &GridFunction, g_mu: &SymbolGrid, bank: &DyadicBank, sf: &ScalingFunction, kappa: f64, beta: f64) -> Result<f64> {
    let v = apply_fractional(u, g_mu, kappa)?;
    Ok(u.sup_norm() + besov_from_bands(&bank.band_sup_norms(&v)?, &band_weights(bank, sf, beta)))
}

/// |(I − L^μ)^κ u|_{β,∞}; at κ = 1 the full symbol is used.
pub fn resolvent_norm(u: &GridFunction, g_mu: &SymbolGrid, bank: &DyadicBank, sf: &ScalingFunction, kappa: f64, beta: f64) -> Result<f64> {
    let v = if kappa == 1.0 { apply_resolvent_full(u, g_mu, 1.0, 1)? } else { apply_resolvent_power(u, g_mu, 1.0, kappa, 1)? };
    Ok(besov_from_bands(&bank.band_sup_norms(&v)?, &band_weights(bank, sf, beta)))
}

/// Extent of one ratio over the family on one lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRange {
    pub min: f64,
    pub max: f64,
}

impl RatioRange {
    fn of(v: &[f64]) -> RatioRange {
        RatioRange { min: v.iter().cloned().fold(f64::INFINITY, f64::min), max: v.iter().cloned().fold(0.0, f64::max) }
    }
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

/// Inputs of the equivalence report.
#[derive(Debug, Clone)]
pub struct EquivalenceCase<'a> {
    /// operator measure, used for |L^{ν,κ}u|_{β,∞}
    pub nu: &'a LevyModel,
    /// reference measure defining the operator-based norms
    pub mu: &'a LevyModel,
    pub sf: &'a ScalingFunction,
    pub lattice: &'a Lattice,
    pub base: f64,
    pub beta: f64,
    pub spread_bound: f64,
}

/// Named per-member ratios on one lattice; members with a vanishing denominator are skipped.
fn ratios(case: &EquivalenceCase, lattice: &Lattice, kappas: &[f64], family: &[TrigPoly], with_holder: bool) -> Result<(Vec<(String, RatioRange)>, usize)> {
    let g_nu = SymbolGrid::compute(case.nu, lattice)?;
    let g_mu = if std::ptr::eq(case.mu, case.nu) { g_nu.clone() } else { SymbolGrid::compute(case.mu, lattice)? };
    let bank = DyadicBank::new(case.base, lattice, None)?;
    let wb = band_weights(&bank, case.sf, case.beta);
    let per: Vec<Option<Vec<(String, f64)>>> = family
        .par_iter()
        .map(|p| {
            let u = p.to_grid(lattice);
            let bands = bank.band_sup_norms(&u)?;
            let b = besov_from_bands(&bands, &wb);
            if b == 0.0 {
                return Ok(None);
            }
            let mut row = Vec::new();
            if with_holder {
                row.push(("holder/besov".to_string(), holder_norm(&u, case.sf, case.beta)?.value / b));
            }
            for &k in kappas {
                let bk = besov_from_bands(&bands, &band_weights(&bank, case.sf, k + case.beta));
                let lk = apply_fractional(&u, &g_nu, k)?;
                let cor = besov_from_bands(&bank.band_sup_norms(&lk)?, &wb);
                row.push((format!("generator_k{k}"), generator_norm(&u, &g_mu, &bank, case.sf, k, case.beta)? / bk));
                row.push((format!("resolvent_k{k}"), resolvent_norm(&u, &g_mu, &bank, case.sf, k, case.beta)? / bk));
                row.push((format!("operator_bound_k{k}"), cor / bk));
            }
            Ok(Some(row))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<(String, f64)>> = per.iter().flatten().cloned().collect();
    if rows.is_empty() {
        return Err(crate::error::Error::Input("every family member has |u|_(β,∞) = 0".into()));
    }
    let out = (0..rows[0].len())
        .map(|i| {
            let v: Vec<f64> = rows.iter().map(|r| r[i].1).collect();
            (rows[0][i].0.clone(), RatioRange::of(&v))
        })
        .collect();
    Ok((out, family.len() - rows.len()))
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b - a).abs() / a.abs().max(b.abs())
    }
}

/// One record per norm pair: min and max of the ratio on the lattice and its refinement.
pub fn norm_equivalence_report(case: &EquivalenceCase, kappas: &[f64], family: &[TrigPoly]) -> Result<Vec<CheckRecord>> {
    if let Some(k) = kappas.iter().find(|k| !(0.0..=1.0).contains(*k)) {
        return Err(domain(format!("κ must lie in [0,1], got {k}")));
    }
    let asl = case.sf.check_beta_integrability(case.beta)?;
    let with_holder = asl.verdict == Integrability::Holds;
    let (coarse, skipped) = ratios(case, case.lattice, kappas, family, with_holder)?;
    let (fine, _) = ratios(case, &case.lattice.refined()?, kappas, family, with_holder)?;
    let mut out = Vec::new();
    for ((name, a), (_, b)) in coarse.iter().zip(&fine) {
        let ineq = match name.split('_').next() {
            Some("holder/besov") => "|u|_β ≍ |u|_(β,∞)",
            Some("generator") => "|u|_(μ,κ,β) ≍ |u|_(κ+β,∞)",
            Some("resolvent") => "‖u‖_(μ,κ,β) ≍ |u|_(κ+β,∞)",
            _ => "|L^(ν,κ)u|_(β,∞) ≤ C|u|_(β+κ,∞)",
        };
        let spread = a.spread().max(b.spread());
        let mv = rel_change(a.min, b.min).max(rel_change(a.max, b.max));
        let bound_only = name.starts_with("operator_bound");
        let mut r = CheckRecord::new(&format!("equivalence_{name}"), ineq, case.spread_bound)
            .constant("min", a.min)
            .constant("max", a.max)
            .constant("min_refined", b.min)
            .constant("max_refined", b.max)
            .constant("refinement_change", mv)
            .require(a.max.is_finite() && b.max.is_finite(), "ratio is not finite")
            .require(mv <= REFINEMENT_TOLERANCE, format!("ratio range moved by {mv:.3} under refinement"));
        if bound_only {
            r = r.note("one-sided bound: only the maximum is certified");
        } else {
            r = r.constant("spread", spread).require(
                a.min > 0.0 && spread <= case.spread_bound,
                format!("max/min = {spread:.3e} exceeds {:.0e}", case.spread_bound),
            );
        }
        if skipped > 0 {
            r = r.note(format!("{skipped} members with |u|_(β,∞) = 0 skipped"));
        }
        out.push(r);
    }
    if !with_holder {
        out.push(
            CheckRecord::new("equivalence_holder/besov", "|u|_β ≍ |u|_(β,∞)", case.spread_bound)
                .note(format!("skipped: β = {} fails the small-scale integrability condition", case.beta)),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::Angular;
    use crate::lp::bank::band;
    use crate::verify::band_limited_family;
    use num_complex::Complex64;

    fn setup() -> (LevyModel, ScalingFunction, Lattice) {
        (
            LevyModel::stable(1, 1.5, Angular::uniform(1)).unwrap(),
            ScalingFunction::power(1.5).unwrap(),
            Lattice::new(1, 1.0, 1024).unwrap(),
        )
    }

    #[test]
    fn single_mode_generator_norm_is_mode_arithmetic() {
        let (m, sf, l) = setup();
        let k = 7.0;
        let u = GridFunction::from_fn(&l, |x| Complex64::new((std::f64::consts::TAU * k * x[0]).cos(), 0.0));
        let g = SymbolGrid::compute(&m, &l).unwrap();
        let bank = DyadicBank::new(4.0, &l, None).unwrap();
        let psi = -crate::symbol::symbol(&m, [k, 0.0]).unwrap().re;
        let besov = |e: f64| (0..=bank.j_max()).map(|j| sf.w_unchecked(4f64.powi(-(j as i32))).powf(-e) * band(4.0, j, k)).fold(0.0, f64::max);
        let got = generator_norm(&u, &g, &bank, &sf, 1.0, 0.3).unwrap();
        let want = 1.0 + psi * besov(0.3);
        assert!((got - want).abs() < 1e-9 * want, "{got} {want}");
        let got = resolvent_norm(&u, &g, &bank, &sf, 1.0, 0.3).unwrap();
        assert!((got - (1.0 + psi) * besov(0.3)).abs() < 1e-9 * got);
    }

    #[test]
    fn family_ratios_are_bounded_and_stable() {
        let (m, sf, l) = setup();
        let case = EquivalenceCase { nu: &m, mu: &m, sf: &sf, lattice: &l, base: 4.0, beta: 0.5, spread_bound: DEFAULT_SPREAD_BOUND };
        let jm = DyadicBank::new(4.0, &l, None).unwrap().j_max();
        let fam = band_limited_family(1, 1.0, 4.0, jm - 2, 20, 11, |_| 1.0);
        let recs = norm_equivalence_report(&case, &[0.0, 0.5, 1.0], &fam).unwrap();
        assert_eq!(recs.len(), 1 + 3 * 3);
        for r in &recs {
            assert!(r.pass, "{r:?}");
        }
        let scaled: Vec<TrigPoly> = fam.iter().map(|p| p.scaled(Complex64::new(2.5, 0.0))).collect();
        let again = norm_equivalence_report(&case, &[0.5], &scaled).unwrap();
        let base = norm_equivalence_report(&case, &[0.5], &fam).unwrap();
        for (a, b) in base.iter().zip(&again) {
            for (k, v) in &a.constants {
                let d = if k == "refinement_change" { (v - b.constants[k]).abs() } else { rel_change(*v, b.constants[k]) };
                assert!(d < 1e-12, "{k}");
            }
        }
    }

    #[test]
    fn failing_integrability_skips_the_holder_pair() {
        let (m, sf, l) = setup();
        let case = EquivalenceCase { nu: &m, mu: &m, sf: &sf, lattice: &l, base: 4.0, beta: 0.8, spread_bound: DEFAULT_SPREAD_BOUND };
        let fam = band_limited_family(1, 1.0, 4.0, 2, 4, 1, |_| 1.0);
        let recs = norm_equivalence_report(&case, &[0.5], &fam).unwrap();
        assert!(recs.last().unwrap().notes[0].contains("skipped"));
    }
}
