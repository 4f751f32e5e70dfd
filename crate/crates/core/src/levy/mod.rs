//! Lévy measures in radial-angular form: ν(dy) = j(|y|) |y|^{d−1} d|y| S(dθ).

pub mod assumptions;
pub mod bernstein;
pub mod radial;
pub mod sampling;

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::math::{interp::logspace, quad};

pub use assumptions::{check_assumption_a, order_estimate, scaled_moments, AssumptionGrids, AssumptionReport};
pub use bernstein::{bernstein_phi, BernsteinPhi};
pub use radial::{PowerTerm, RadialProfile, RadialTable};
pub use sampling::{sample_increment, IncrementSampler, IncrementSource, StableSampler};

/// Numerical support of radial integrals; beyond it power-law tails are added analytically.
pub const R_MIN: f64 = 1e-8;
pub const R_MAX: f64 = 1e8;
/// Log panels per decade in radial quadrature (64 panels over 16 decades).
pub const PANELS_PER_DECADE: f64 = 4.0;

/// Angular measure S on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum Angular {
    /// d = 1: point masses at +1 and −1.
    Line { plus: f64, minus: f64 },
    /// d = 2: density w.r.t. dθ sampled at θ_k = 2πk/n (trapezoid rule).
    Circle { weights: Vec<f64> },
}

impl Angular {
    pub fn uniform(dim: usize) -> Angular {
        if dim == 1 {
            Angular::Line { plus: 1.0, minus: 1.0 }
        } else {
            Angular::Circle { weights: vec![1.0; 64] }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match (self, dim) {
            (Angular::Line { plus, minus }, 1) => {
                if *plus >= 0.0 && *minus >= 0.0 && plus + minus > 0.0 {
                    Ok(())
                } else {
                    Err(domain("angular weights must be nonnegative with positive total"))
                }
            }
            (Angular::Circle { weights }, 2) => {
                if weights.len() < 4 || weights.len() % 2 != 0 {
                    return Err(domain("circle angular table needs an even number (≥ 4) of nodes"));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
                    return Err(domain("angular weights must be nonnegative with positive total"));
                }
                Ok(())
            }
            _ => Err(domain(format!("angular measure does not match dimension {dim}"))),
        }
    }

    /// Discrete directions with their quadrature masses.
    pub fn atoms(&self) -> Vec<([f64; 2], f64)> {
        match self {
            Angular::Line { plus, minus } => vec![([1.0, 0.0], *plus), ([-1.0, 0.0], *minus)],
            Angular::Circle { weights } => {
                let n = weights.len();
                let dth = 2.0 * std::f64::consts::PI / n as f64;
                weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| {
                        let th = dth * k as f64;
                        ([th.cos(), th.sin()], w * dth)
                    })
                    .collect()
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.atoms().iter().map(|a| a.1).sum()
    }

    /// ∫ θ S(dθ).
    pub fn first_moment(&self) -> [f64; 2] {
        match self {
            Angular::Line { plus, minus } => [plus - minus, 0.0],
            Angular::Circle { weights } => {
                // pair θ with θ+π so that symmetric tables cancel exactly
                let n = weights.len();
                let h = n / 2;
                let dth = 2.0 * std::f64::consts::PI / n as f64;
                let mut m = [0.0; 2];
                for k in 0..h {
                    let th = dth * k as f64;
                    let diff = (weights[k] - weights[k + h]) * dth;
                    m[0] += diff * th.cos();
                    m[1] += diff * th.sin();
                }
                m
            }
        }
    }

    /// ∫ |e·θ|² S(dθ) for a unit vector e.
    pub fn directional_second_moment(&self, e: [f64; 2]) -> f64 {
        self.atoms()
            .iter()
            .map(|(th, m)| {
                let p = e[0] * th[0] + e[1] * th[1];
                p * p * m
            })
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Angular::Line { plus, minus } => plus == minus,
            Angular::Circle { weights } => {
                let h = weights.len() / 2;
                (0..h).all(|k| weights[k] == weights[k + h])
            }
        }
    }

    pub fn symmetrized(&self) -> Angular {
        match self {
            Angular::Line { plus, minus } => {
                let m = 0.5 * (plus + minus);
                Angular::Line { plus: m, minus: m }
            }
            Angular::Circle { weights } => {
                let n = weights.len();
                let h = n / 2;
                Angular::Circle {
                    weights: (0..n).map(|k| 0.5 * (weights[k] + weights[(k + h) % n])).collect(),
                }
            }
        }
    }

    pub fn is_uniform_unit(&self) -> bool {
        match self {
            Angular::Line { plus, minus } => *plus == 1.0 && *minus == 1.0,
            Angular::Circle { weights } => weights.iter().all(|w| *w == 1.0),
        }
    }
}

/// Which jumps the generator compensates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    /// order in (1, 2): every jump
    All,
    /// order 1: jumps in the unit ball
    UnitBall,
    /// order in (0, 1): none
    NoCompensation,
}

impl Cutoff {
    pub fn for_order(alpha: f64) -> Cutoff {
        if alpha > 1.0 {
            Cutoff::All
        } else if alpha == 1.0 {
            Cutoff::UnitBall
        } else {
            Cutoff::NoCompensation
        }
    }

    #[inline]
    pub fn weight(&self, r: f64) -> f64 {
        match self {
            Cutoff::All => 1.0,
            Cutoff::UnitBall => f64::from(u8::from(r <= 1.0)),
            Cutoff::NoCompensation => 0.0,
        }
    }
}

/// Family the measure was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Stable,
    Bernstein(BernsteinPhi),
    Tabulated,
}

/// Exponents (α₁, α₂) used in the scaled-moment bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentExponents {
    pub alpha1: f64,
    pub alpha2: f64,
}

/// A Lévy measure, possibly rescaled to w(R)·ν_R.
#[derive(Debug, Clone)]
pub struct LevyModel {
    dim: usize,
    order: f64,
    kind: ModelKind,
    radial: RadialProfile,
    angular: Angular,
    /// local power exponents of the measure at small and large scales (lo ≤ hi)
    exponents: (f64, f64),
    moments: MomentExponents,
    scale: f64,
    mass: f64,
}

fn default_moments(order: f64, lo: f64, hi: f64) -> MomentExponents {
    let hi = hi.max(order);
    let lo = lo.min(order);
    if order < 1.0 {
        MomentExponents { alpha1: 0.5 * (hi + 1.0), alpha2: 0.5 * lo }
    } else if order == 1.0 {
        MomentExponents { alpha1: 1.5, alpha2: 0.5 }
    } else {
        MomentExponents { alpha1: 0.5 * (hi + 2.0), alpha2: 0.5 * (1.0 + lo) }
    }
}

impl LevyModel {
    /// α-stable measure |y|^{−d−α} on rays, weighted by `angular`.
    pub fn stable(dim: usize, alpha: f64, angular: Angular) -> Result<LevyModel> {
        check_dim(dim)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(domain(format!("stable order must lie in (0,2), got {alpha}")));
        }
        angular.validate(dim)?;
        Ok(LevyModel {
            dim,
            order: alpha,
            kind: ModelKind::Stable,
            radial: RadialProfile::PowerSum(vec![PowerTerm { coef: 1.0, exponent: dim as f64 + alpha }]),
            angular,
            exponents: (alpha, alpha),
            moments: default_moments(alpha, alpha, alpha),
            scale: 1.0,
            mass: 1.0,
        })
    }

    /// Subordinate Brownian motion measure with radial profile j built from φ;
    /// `angular` plays the role of a(w) (use `Angular::uniform` for a ≡ 1).
    pub fn bernstein(dim: usize, phi: BernsteinPhi, angular: Angular) -> Result<LevyModel> {
        check_dim(dim)?;
        angular.validate(dim)?;
        let order = 2.0 * phi.exponent_at_infinity();
        let (d1, d2) = phi.deltas();
        let radial = match phi.levy_density_closed_form() {
            Some(terms) => {
                let half_d = dim as f64 / 2.0;
                let fp = (4.0 * std::f64::consts::PI).powf(-half_d);
                RadialProfile::PowerSum(
                    terms
                        .iter()
                        .map(|&(c, p)| {
                            // ∫ (4πt)^{−d/2} e^{−r²/4t} c t^{−p} dt
                            let a = p - 1.0;
                            let coef = c * fp * crate::math::special::gamma(half_d + a) * 4f64.powf(half_d + a);
                            PowerTerm { coef, exponent: dim as f64 + 2.0 * a }
                        })
                        .collect(),
                )
            }
            None => {
                let radii = logspace(R_MIN / 10.0, R_MAX * 10.0, 217);
                let j = bernstein::radial_profile_numeric(&phi, dim, &radii)?;
                RadialProfile::Table(Arc::new(RadialTable::new(dim, &radii, &j)?))
            }
        };
        Ok(LevyModel {
            dim,
            order,
            kind: ModelKind::Bernstein(phi),
            radial,
            angular,
            exponents: (2.0 * d1, 2.0 * d2),
            moments: default_moments(order, 2.0 * d1, 2.0 * d2),
            scale: 1.0,
            mass: 1.0,
        })
    }

    /// Measure with tabulated radial density (strictly increasing radii) and declared order.
    pub fn tabulated(dim: usize, order: f64, radii: &[f64], density: &[f64], angular: Angular) -> Result<LevyModel> {
        check_dim(dim)?;
        if !(order > 0.0 && order < 2.0) {
            return Err(domain(format!("order must lie in (0,2), got {order}")));
        }
        angular.validate(dim)?;
        let table = RadialTable::new(dim, radii, density)?;
        Ok(LevyModel {
            dim,
            order,
            kind: ModelKind::Tabulated,
            radial: RadialProfile::Table(Arc::new(table)),
            angular,
            exponents: (order, order),
            moments: default_moments(order, order, order),
            scale: 1.0,
            mass: 1.0,
        })
    }

    pub fn with_moments(mut self, m: MomentExponents) -> Result<LevyModel> {
        let a = self.order;
        let ok = if a < 1.0 {
            m.alpha1 > 0.0 && m.alpha1 < 1.0 && m.alpha2 > 0.0 && m.alpha2 < 1.0
        } else if a == 1.0 {
            m.alpha1 > 1.0 && m.alpha1 <= 2.0 && m.alpha2 >= 0.0 && m.alpha2 < 1.0
        } else {
            m.alpha1 > 1.0 && m.alpha1 <= 2.0 && m.alpha2 > 1.0 && m.alpha2 <= 2.0
        };
        if !ok || m.alpha1 < m.alpha2 {
            return Err(domain(format!(
                "moment exponents ({}, {}) outside the admissible range for order {a}",
                m.alpha1, m.alpha2
            )));
        }
        self.moments = m;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn order(&self) -> f64 {
        self.order
    }
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }
    pub fn angular(&self) -> &Angular {
        &self.angular
    }
    pub fn radial(&self) -> &RadialProfile {
        &self.radial
    }
    pub fn moments(&self) -> MomentExponents {
        self.moments
    }
    pub fn exponents(&self) -> (f64, f64) {
        self.exponents
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn cutoff(&self) -> Cutoff {
        Cutoff::for_order(self.order)
    }
    pub fn is_symmetric(&self) -> bool {
        self.angular.is_symmetric()
    }

    /// Stable measure: the coefficient c of the effective radial density c·r^{−d−α}.
    pub fn stable_coefficient(&self) -> Option<f64> {
        match (&self.kind, &self.radial) {
            (ModelKind::Stable, RadialProfile::PowerSum(t)) if t.len() == 1 => {
                Some(self.mass * self.scale.powf(-self.order) * t[0].coef)
            }
            _ => None,
        }
    }

    /// Effective radial density j̃(r) = mass·R^d·j(R r).
    #[inline]
    pub fn radial_density(&self, r: f64) -> f64 {
        self.mass * self.scale.powi(self.dim as i32) * self.radial.density(self.scale * r)
    }

    /// Radial measure density j̃(r) r^{d−1} (per unit angular mass).
    #[inline]
    pub fn radial_measure(&self, r: f64) -> f64 {
        self.radial_density(r) * r.powi(self.dim as i32 - 1)
    }

    /// ς(r) = ν(|y| > r).
    pub fn tail_mass(&self, r: f64) -> Result<f64> {
        crate::error::check_positive("r", r)?;
        Ok(self.angular.total() * self.mass * self.radial.tail(self.dim, self.scale * r))
    }

    /// Radius ρ with ς(ρ) = m.
    pub fn tail_mass_inverse(&self, m: f64) -> f64 {
        let base = m / (self.angular.total() * self.mass);
        self.radial.tail_inverse(self.dim, base) / self.scale
    }

    /// ∫_{lo<|y|<hi} h(|y|) ν(dy) / S_total, i.e. the radial integral against j̃ r^{d−1};
    /// `lo = 0` or `hi = ∞` adds power-law tails.
    pub fn radial_integral(&self, lo: f64, hi: f64, per_decade: f64, h: impl Fn(f64) -> f64) -> Result<f64> {
        let f = |r: f64| h(r) * self.radial_measure(r);
        let a = if lo <= 0.0 { R_MIN } else { lo };
        let b = if hi.is_infinite() { R_MAX.max(a * 10.0) } else { hi };
        let mut total = quad::log_panels(quad::gl8(), a, b, per_decade, f);
        if lo <= 0.0 {
            total += quad::power_tail_below(f, a).ok_or(Error::Integration { achieved: f64::INFINITY })?;
        }
        if hi.is_infinite() {
            total += quad::power_tail_above(f, b).ok_or(Error::Integration { achieved: f64::INFINITY })?;
        }
        if !total.is_finite() {
            return Err(Error::Integration { achieved: f64::NAN });
        }
        Ok(total)
    }

    /// w(R)·ν_R: the measure B ↦ w_r·ν(R B).
    pub fn rescaled(&self, r: f64, w_r: f64) -> LevyModel {
        let mut m = self.clone();
        m.scale *= r;
        m.mass *= w_r;
        m
    }

    /// ν̄(dy) = ½(ν(dy) + ν(−dy)).
    pub fn symmetrize(&self) -> LevyModel {
        let mut m = self.clone();
        m.angular = self.angular.symmetrized();
        m
    }

    /// Same radial law with a different angular measure.
    pub fn with_angular(&self, angular: Angular) -> Result<LevyModel> {
        angular.validate(self.dim)?;
        let mut m = self.clone();
        m.angular = angular;
        Ok(m)
    }

    /// ∫(1 ∧ |y|²) ν(dy).
    pub fn levy_integrability(&self) -> Result<f64> {
        let s = self.angular.total();
        let inner = self.radial_integral(0.0, 1.0, PANELS_PER_DECADE, |r| r * r)?;
        let outer = self.radial_integral(1.0, f64::INFINITY, PANELS_PER_DECADE, |_| 1.0)?;
        Ok(s * (inner + outer))
    }

    /// Short stable identifier for manifests.
    pub fn describe(&self) -> String {
        let kind = match &self.kind {
            ModelKind::Stable => "stable".to_string(),
            ModelKind::Bernstein(p) => format!("bernstein{}{:?}", p.kind, p.params),
            ModelKind::Tabulated => "table".to_string(),
        };
        format!(
            "{kind};d={};order={};angular={:?};scale={};mass={}",
            self.dim, self.order, self.angular, self.scale, self.mass
        )
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(domain(format!("dimension must be 1 or 2, got {dim}")))
    }
}
