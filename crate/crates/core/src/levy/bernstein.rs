//! Bernstein functions φ of the four example families and their subordinator densities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::math::{interp::LogLogTable, quad, special::gamma, talbot};

/// φ of kind 1 (Σ r^{a_i}), 2 ((r + r^a)^b), 3 (r^a ln(1+r)^b) or 4 ((ln cosh √r)^a).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinPhi {
    pub kind: u8,
    pub params: Vec<f64>,
}

fn in_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

fn ln_cosh_sqrt(r: f64) -> f64 {
    let z = r.sqrt();
    if z < 1.0 {
        let s = (0.5 * z).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        z - std::f64::consts::LN_2 + (-2.0 * z).exp().ln_1p()
    }
}

fn ln_cosh_complex(z: Complex64) -> Complex64 {
    if z.norm() < 0.02 {
        let z2 = z * z;
        z2 * (0.5 - z2 * (1.0 / 12.0 - z2 * (1.0 / 45.0 - z2 * 17.0 / 2520.0)))
    } else {
        z - std::f64::consts::LN_2 + (1.0 + (-2.0 * z).exp()).ln()
    }
}

fn tanh_over_2z(z: Complex64) -> Complex64 {
    if z.norm() < 0.02 {
        let z2 = z * z;
        0.5 * (1.0 - z2 / 3.0 + z2 * z2 * 2.0 / 15.0)
    } else {
        let e = (-2.0 * z).exp();
        (1.0 - e) / (1.0 + e) / (2.0 * z)
    }
}

impl BernsteinPhi {
    pub fn new(kind: u8, params: Vec<f64>) -> Result<Self> {
        let ok = match kind {
            1 => !params.is_empty() && params.iter().all(|&a| in_unit(a)),
            2 => params.len() == 2 && in_unit(params[0]) && in_unit(params[1]),
            3 => params.len() == 2 && in_unit(params[0]) && params[1] > 0.0 && params[1] < 1.0 - params[0],
            4 => params.len() == 1 && in_unit(params[0]),
            _ => false,
        };
        if ok {
            Ok(BernsteinPhi { kind, params })
        } else {
            Err(domain(format!("Bernstein kind {kind} does not accept parameters {params:?}")))
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let p = &self.params;
        match self.kind {
            1 => p.iter().map(|a| r.powf(*a)).sum(),
            2 => (r + r.powf(p[0])).powf(p[1]),
            3 => r.powf(p[0]) * r.ln_1p().powf(p[1]),
            _ => ln_cosh_sqrt(r).powf(p[0]),
        }
    }

    /// φ′ continued to the slit plane ℂ ∖ (−∞, 0].
    pub fn derivative(&self, s: Complex64) -> Complex64 {
        let p = &self.params;
        match self.kind {
            1 => p.iter().map(|a| *a * s.powf(a - 1.0)).sum(),
            2 => {
                let (a, b) = (p[0], p[1]);
                b * (s + s.powf(a)).powf(b - 1.0) * (1.0 + a * s.powf(a - 1.0))
            }
            3 => {
                let (a, b) = (p[0], p[1]);
                let l = ln_1p_complex(s);
                a * s.powf(a - 1.0) * l.powf(b) + s.powf(a) * b * l.powf(b - 1.0) / (1.0 + s)
            }
            _ => {
                let a = p[0];
                let z = s.sqrt();
                a * ln_cosh_complex(z).powf(a - 1.0) * tanh_over_2z(z)
            }
        }
    }

    /// Exponents (δ₁, δ₂) of the two-sided ratio bound on φ(R)/φ(r).
    pub fn deltas(&self) -> (f64, f64) {
        let p = &self.params;
        match self.kind {
            1 => (
                p.iter().cloned().fold(f64::INFINITY, f64::min),
                p.iter().cloned().fold(0.0, f64::max),
            ),
            2 => (p[0] * p[1], p[1]),
            3 => (p[0], p[0] + p[1]),
            _ => (0.5 * p[0], p[0]),
        }
    }

    /// Growth exponent of φ at infinity; twice it is the order of the induced measure.
    pub fn exponent_at_infinity(&self) -> f64 {
        let p = &self.params;
        match self.kind {
            1 => p.iter().cloned().fold(0.0, f64::max),
            2 => p[1],
            3 => p[0],
            _ => 0.5 * p[0],
        }
    }

    /// Constant C of the ratio bound, sampled on `grid`: the smallest C with
    /// C⁻¹(R/r)^{δ₁} ≤ φ(R)/φ(r) ≤ C(R/r)^{δ₂} for all grid pairs r ≤ R.
    pub fn ratio_bound_constant(&self, grid: &[f64]) -> f64 {
        let (d1, d2) = self.deltas();
        let vals: Vec<f64> = grid.iter().map(|&r| self.eval(r)).collect();
        let mut c: f64 = 1.0;
        for i in 0..grid.len() {
            for k in i..grid.len() {
                let q = grid[k] / grid[i];
                let ratio = vals[k] / vals[i];
                c = c.max(ratio / q.powf(d2)).max(q.powf(d1) / ratio);
            }
        }
        c
    }

    /// Density of the Lévy measure Λ(dt) of the subordinator.
    pub fn levy_density_closed_form(&self) -> Option<Vec<(f64, f64)>> {
        // kind 1: Λ(dt) = Σ a/Γ(1−a) t^{−1−a} dt, returned as (coefficient, exponent) pairs
        (self.kind == 1).then(|| {
            self.params.iter().map(|&a| (a / gamma(1.0 - a), 1.0 + a)).collect()
        })
    }

    /// Λ density at t by Talbot inversion of φ′: tλ(t) = L⁻¹[φ′](t).
    pub fn levy_density_numeric(&self, t: f64) -> f64 {
        talbot::invert(|s| self.derivative(s), t, 24) / t
    }
}

fn ln_1p_complex(s: Complex64) -> Complex64 {
    if s.norm() < 1e-3 {
        // alternating series, truncation error below |s|^7/7
        let mut term = s;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=6 {
            acc += term / k as f64 * if k % 2 == 1 { 1.0 } else { -1.0 };
            term *= s;
        }
        acc
    } else {
        (1.0 + s).ln()
    }
}

/// Element of the list of example families, checked and evaluated in one call.
pub fn bernstein_phi(kind: u8, params: &[f64], r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain(format!("φ needs a finite nonnegative argument, got {r}")));
    }
    Ok(BernsteinPhi::new(kind, params.to_vec())?.eval(r))
}

/// Radial profile j(r) = ∫(4πt)^{−d/2} e^{−r²/4t} Λ(dt) sampled on `radii`,
/// with Λ obtained numerically from φ.
pub fn radial_profile_numeric(phi: &BernsteinPhi, d: usize, radii: &[f64]) -> Result<Vec<f64>> {
    let ts = crate::math::interp::logspace(1e-26, 1e32, 581);
    let lam: Vec<f64> = ts.iter().map(|&t| phi.levy_density_numeric(t)).collect();
    if let Some(bad) = lam.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(crate::error::Error::Model(format!(
            "subordinator density not positive at t={:e}",
            ts[bad]
        )));
    }
    let table = LogLogTable::new(&ts, &lam)?;
    Ok(heat_average(d, radii, |t| table.eval(t)))
}

/// j(r) for each radius given a Λ density.
pub fn heat_average(d: usize, radii: &[f64], lam: impl Fn(f64) -> f64 + Sync) -> Vec<f64> {
    use rayon::prelude::*;
    let half_d = d as f64 / 2.0;
    radii
        .par_iter()
        .map(|&r| {
            let r2 = r * r;
            let f = |t: f64| (4.0 * std::f64::consts::PI * t).powf(-half_d) * (-r2 / (4.0 * t)).exp() * lam(t);
            let lo = r2 / 2000.0;
            let hi = r2 * 1e12;
            let body = quad::log_panels(quad::gl8(), lo, hi, 10.0, f);
            let tail = quad::power_tail_above(f, hi).unwrap_or(0.0);
            body + tail
        })
        .collect()
}
