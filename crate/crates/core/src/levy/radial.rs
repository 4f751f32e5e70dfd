//! Radial profiles j(r): finite power sums with closed-form integrals, or tables.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::math::{interp::LogLogTable, quad};

/// Term c·r^{−p} of a power-sum profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coef: f64,
    pub exponent: f64,
}

/// Profile tabulated on strictly increasing radii, interpolated in log-log.
#[derive(Debug)]
pub struct RadialTable {
    dim: usize,
    density: LogLogTable,
    /// ∫_r^∞ j(s) s^{d−1} ds on the table radii
    tail: LogLogTable,
    /// inverse of `tail`: radius as a function of the tail integral
    tail_inverse: LogLogTable,
    radii: Vec<f64>,
}

impl RadialTable {
    pub fn new(dim: usize, radii: &[f64], density: &[f64]) -> Result<Self> {
        if radii.len() < 4 {
            return Err(Error::Input("radial table needs at least four rows".into()));
        }
        let table = LogLogTable::new(radii, density)?;
        let n = radii.len();
        let g = |s: f64| table.eval(s) * s.powi(dim as i32 - 1);
        let top = radii[n - 1];
        let mut tail = vec![0.0; n];
        tail[n - 1] = quad::power_tail_above(g, top).ok_or_else(|| {
            Error::Model("radial density decays too slowly at large radii (infinite tail mass)".into())
        })?;
        for k in (0..n - 1).rev() {
            tail[k] = tail[k + 1] + quad::log_panels(quad::gl8(), radii[k], radii[k + 1], 8.0, g);
        }
        let tail_table = LogLogTable::new(radii, &tail)?;
        let rev_t: Vec<f64> = tail.iter().rev().cloned().collect();
        let rev_r: Vec<f64> = radii.iter().rev().cloned().collect();
        let tail_inverse = LogLogTable::new(&rev_t, &rev_r)?;
        Ok(RadialTable { dim, density: table, tail: tail_table, tail_inverse, radii: radii.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn density(&self, r: f64) -> f64 {
        self.density.eval(r)
    }

    fn tail(&self, r: f64) -> f64 {
        let (lo, _) = self.tail.range();
        if r < lo {
            // ∫_r^lo added from the power-law extension of the density
            let g = |s: f64| self.density.eval(s) * s.powi(self.dim as i32 - 1);
            self.tail.eval(lo) + quad::log_panels(quad::gl8(), r, lo, 8.0, g)
        } else {
            self.tail.eval(r)
        }
    }
}

/// Radial profile of the base (unscaled) measure.
#[derive(Debug, Clone)]
pub enum RadialProfile {
    PowerSum(Vec<PowerTerm>),
    Table(Arc<RadialTable>),
}

impl RadialProfile {
    pub fn density(&self, r: f64) -> f64 {
        match self {
            RadialProfile::PowerSum(terms) => terms.iter().map(|t| t.coef * r.powf(-t.exponent)).sum(),
            RadialProfile::Table(t) => t.density(r),
        }
    }

    /// ∫_r^∞ j(s) s^{d−1} ds.
    pub fn tail(&self, dim: usize, r: f64) -> f64 {
        match self {
            RadialProfile::PowerSum(terms) => terms
                .iter()
                .map(|t| t.coef * r.powf(dim as f64 - t.exponent) / (t.exponent - dim as f64))
                .sum(),
            RadialProfile::Table(t) => t.tail(r),
        }
    }

    /// Radius ρ with tail(ρ) = m.
    pub fn tail_inverse(&self, dim: usize, m: f64) -> f64 {
        match self {
            RadialProfile::PowerSum(terms) if terms.len() == 1 => {
                let t = terms[0];
                let q = t.exponent - dim as f64;
                (m * q / t.coef).powf(-1.0 / q)
            }
            RadialProfile::PowerSum(_) => {
                let (mut lo, mut hi) = (-60.0f64, 60.0f64);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.tail(dim, mid.exp()) > m {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (0.5 * (lo + hi)).exp()
            }
            RadialProfile::Table(t) => t.tail_inverse.eval(m),
        }
    }
}
