//! Lévy symbols ψ(ξ) = ∫[e^{i2πξ·y} − 1 − i2πχ(y)ξ·y] ν(dy) on frequency lattices,
//! and the multipliers built from them.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_positive, domain, Error, Result};
use crate::levy::{Angular, Cutoff, LevyModel, ModelKind, RadialProfile};
use crate::lp::Lattice;
use crate::math::interp::{logspace, LogLogTable, MonotoneCubic};
use crate::math::quad::{self, gl16, gl8};
use crate::math::special::{gamma, EULER_GAMMA};
use crate::scaling::ScalingFunction;


/// Directions with their total and odd angular masses: m_θ and (m_θ − m_{−θ})/2.
fn split_atoms(a: &Angular) -> Vec<([f64; 2], f64, f64)> {
    match a {
        Angular::Line { plus, minus } => {
            let odd = 0.5 * (plus - minus);
            vec![([1.0, 0.0], *plus, odd), ([-1.0, 0.0], *minus, -odd)]
        }
        Angular::Circle { weights } => {
            let n = weights.len();
            let dth = TAU / n as f64;
            (0..n)
                .map(|k| {
                    let th = dth * k as f64;
                    let odd = 0.5 * (weights[k] - weights[(k + n / 2) % n]) * dth;
                    ([th.cos(), th.sin()], weights[k] * dth, odd)
                })
                .collect()
        }
    }
}

/// One-sided kernel ∫₀^∞ [e^{isu r} − 1 − i s u r χ(r)] c r^{−1−a} dr at u = 2π|q| > 0,
/// returned as (real part, imaginary part for s = +1). The imaginary part is `None`
/// when the compensated integral diverges.
fn power_kernel(a: f64, coef: f64, cutoff: Cutoff, u: f64) -> (f64, Option<f64>) {
    if a == 1.0 {
        let re = -FRAC_PI_2 * u;
        let im = match cutoff {
            Cutoff::UnitBall => Some(u * (1.0 - EULER_GAMMA - u.ln())),
            _ => None,
        };
        return (coef * re, im.map(|v| coef * v));
    }
    let g = gamma(-a);
    let ua = u.powf(a);
    let re = g * (PI * a / 2.0).cos() * ua;
    let base = -g * (PI * a / 2.0).sin() * ua;
    let im = match (cutoff, a < 1.0) {
        (Cutoff::NoCompensation, true) | (Cutoff::All, false) => Some(base),
        (Cutoff::UnitBall, true) => Some(base - u / (1.0 - a)),
        (Cutoff::UnitBall, false) => Some(base + u / (a - 1.0)),
        _ => None,
    };
    (coef * re, im.map(|v| coef * v))
}

/// Effective power terms c·r^{−1−a} of the radial measure j̃(r) r^{d−1}, if it is a power sum.
fn effective_terms(model: &LevyModel) -> Option<Vec<(f64, f64)>> {
    let RadialProfile::PowerSum(terms) = model.radial() else {
        return None;
    };
    let d = model.dim() as f64;
    Some(
        terms
            .iter()
            .map(|t| {
                let a = t.exponent - d;
                (a, model.mass() * t.coef * model.scale().powf(-a))
            })
            .collect(),
    )
}

/// ∫₀^∞ (1 − cos u) u^{−1−α} du by direct quadrature (periods, then an asymptotic tail).
pub fn one_minus_cos_quadrature(alpha: f64) -> f64 {
    let f = |u: f64| 2.0 * (0.5 * u).sin().powi(2) * u.powf(-1.0 - alpha);
    let head = quad::log_panels(gl8(), 1e-12, TAU, 16.0, f) + quad::power_tail_below(f, 1e-12).unwrap_or(0.0);
    let periods = 256;
    let mid = quad::uniform_panels(gl16(), TAU, TAU * periods as f64, 2 * (periods - 1), f);
    let big = TAU * periods as f64;
    // ∫_U^∞ u^{−1−α} du − ∫_U^∞ cos u·u^{−1−α} du, the latter ≈ −h′(U) + h‴(U)
    let h = |u: f64| u.powf(-1.0 - alpha);
    let p = -1.0 - alpha;
    let cos_tail = -p * h(big) / big + p * (p - 1.0) * (p - 2.0) * h(big) / big.powi(3);
    head + mid + big.powf(-alpha) / alpha - cos_tail
}

/// Quadrature settings; `level` multiplies every panel count.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureLevel(pub usize);

/// One-sided kernel of a general radial measure by quadrature, in the variable u = 2π|q| r.
/// Returns (real part, imaginary part for positive q).
pub fn directional_quadrature(model: &LevyModel, q: f64, level: QuadratureLevel) -> (f64, f64) {
    let q = q.abs();
    if q == 0.0 {
        return (0.0, 0.0);
    }
    let lv = level.0.max(1) as f64;
    let u0 = TAU * q;
    let h = |u: f64| model.radial_measure(u / u0) / u0;
    let cutoff = model.cutoff();
    let one_minus_cos = |u: f64| 2.0 * (0.5 * u).sin().powi(2);
    let sin_minus_u = |u: f64| {
        if u < 1e-2 {
            let u2 = u * u;
            -u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0))
        } else {
            u.sin() - u
        }
    };
    // imaginary integrand with the cutoff replaced by 1_{u≤1} for order one
    let im_f = |u: f64| -> f64 {
        let s = match cutoff {
            Cutoff::All => sin_minus_u(u),
            Cutoff::NoCompensation => u.sin(),
            Cutoff::UnitBall => {
                if u <= 1.0 {
                    sin_minus_u(u)
                } else {
                    u.sin()
                }
            }
        };
        s * h(u)
    };
    let re_f = |u: f64| -one_minus_cos(u) * h(u);

    let u_lo = 1e-12;
    let per_decade = 8.0 * lv;
    let mut re = quad::log_panels(gl8(), u_lo, TAU, per_decade, re_f);
    re += quad::power_tail_below(re_f, u_lo).unwrap_or(0.0);
    let mut im = if cutoff == Cutoff::UnitBall {
        quad::log_panels(gl8(), u_lo, 1.0, per_decade, im_f) + quad::log_panels(gl8(), 1.0, TAU, per_decade, im_f)
    } else {
        quad::log_panels(gl8(), u_lo, TAU, per_decade, im_f)
    };
    im += quad::power_tail_below(im_f, u_lo).unwrap_or(0.0);

    let periods = (64.0 * lv) as usize;
    let big = TAU * periods as f64;
    let panels = (periods - 1) * level.0.max(1);
    re += quad::uniform_panels(gl16(), TAU, big, panels, re_f);
    im += quad::uniform_panels(gl16(), TAU, big, panels, im_f);

    // tail beyond U: non-oscillatory parts by log panels, oscillatory parts asymptotically
    let far = big * 1e6;
    let mut h_tail = quad::log_panels(gl8(), big, far, 4.0 * lv, h);
    h_tail += quad::power_tail_above(h, far).unwrap_or(0.0);
    let mut hm = h;
    let p = quad::log_slope(&mut hm, big, 1.0).unwrap_or(-2.0);
    let hb = h(big);
    let d1 = p * hb / big;
    let d2 = p * (p - 1.0) * hb / (big * big);
    let d3 = p * (p - 1.0) * (p - 2.0) * hb / big.powi(3);
    let cos_tail = -d1 + d3;
    let sin_tail = hb - d2;
    re += cos_tail - h_tail;
    im += sin_tail;
    if cutoff == Cutoff::All {
        let uh = |u: f64| u * h(u);
        let mut t = quad::log_panels(gl8(), big, far, 4.0 * lv, uh);
        t += quad::power_tail_above(uh, far).unwrap_or(f64::INFINITY);
        im -= t;
    }
    if cutoff == Cutoff::UnitBall {
        // restore the true cutoff 1_{r≤1}, i.e. 1_{u≤u0}
        let uh = |u: f64| u * h(u);
        if u0 > 1.0 {
            im -= quad::log_panels(gl8(), 1.0, u0, per_decade, uh);
        } else if u0 < 1.0 {
            im += quad::log_panels(gl8(), u0, 1.0, per_decade, uh);
        }
    }
    (re, im)
}

fn assemble(model: &LevyModel, xi: [f64; 2], kernel: impl Fn(f64) -> (f64, Option<f64>)) -> Result<Complex64> {
    let mut re = 0.0;
    let mut im = 0.0;
    for (th, m, odd) in split_atoms(model.angular()) {
        let q = xi[0] * th[0] + xi[1] * th[1];
        if q == 0.0 || (m == 0.0 && odd == 0.0) {
            continue;
        }
        let (kr, ki) = kernel(q.abs());
        re += m * kr;
        if odd != 0.0 {
            let ki = ki.ok_or_else(|| {
                Error::Model("compensator integral diverges for this asymmetric measure".into())
            })?;
            im += odd * ki * q.signum();
        }
    }
    Ok(Complex64::new(re, im))
}

fn closed_form(model: &LevyModel, xi: [f64; 2]) -> Option<Result<Complex64>> {
    if let ModelKind::Bernstein(phi) = model.kind() {
        if model.angular().is_uniform_unit() {
            let s = (xi[0] * xi[0] + xi[1] * xi[1]) / (model.scale() * model.scale());
            return Some(Ok(Complex64::new(-model.mass() * phi.eval(4.0 * PI * PI * s), 0.0)));
        }
    }
    let terms = effective_terms(model)?;
    let cutoff = model.cutoff();
    Some(assemble(model, xi, |q| {
        let u = TAU * q;
        let mut re = 0.0;
        let mut im = Some(0.0);
        for &(a, c) in &terms {
            let (r, i) = power_kernel(a, c, cutoff, u);
            re += r;
            im = im.zip(i).map(|(x, y)| x + y);
        }
        (re, im)
    }))
}

/// ψ(ξ) by quadrature of every direction, ignoring closed forms.
pub fn symbol_quadrature(model: &LevyModel, xi: [f64; 2], level: QuadratureLevel) -> Result<Complex64> {
    assemble(model, xi, |q| {
        let (r, i) = directional_quadrature(model, q, level);
        (r, Some(i))
    })
}

/// ψ(ξ): closed form for power-law radial parts and isotropic subordinated Brownian motion,
/// quadrature otherwise.
pub fn symbol(model: &LevyModel, xi: [f64; 2]) -> Result<Complex64> {
    if !(xi[0].is_finite() && xi[1].is_finite()) {
        return Err(domain("frequency must be finite"));
    }
    let v = match closed_form(model, xi) {
        Some(v) => v?,
        None => symbol_quadrature(model, xi, QuadratureLevel(1))?,
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Integration { achieved: f64::NAN });
    }
    Ok(v)
}

/// Quadrature value with an error estimate from one panel doubling.
pub fn symbol_with_error(model: &LevyModel, xi: [f64; 2]) -> Result<(Complex64, f64)> {
    let a = symbol_quadrature(model, xi, QuadratureLevel(1))?;
    let b = symbol_quadrature(model, xi, QuadratureLevel(2))?;
    Ok((b, (a - b).norm()))
}

/// Symbol values on every node of a frequency lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrid {
    lattice: Lattice,
    values: Vec<Complex64>,
    model_id: String,
}

/// Table of the one-sided kernel over |q| for lattice evaluation of quadrature-only models.
struct KernelTable {
    re: LogLogTable,
    im_ratio: MonotoneCubic,
}

impl KernelTable {
    fn new(model: &LevyModel, q_min: f64, q_max: f64) -> Result<KernelTable> {
        let n = ((q_max / q_min).log10() * 24.0).ceil() as usize + 2;
        let qs = logspace(q_min, q_max, n.max(8));
        let vals: Vec<(f64, f64)> = qs.par_iter().map(|&q| directional_quadrature(model, q, QuadratureLevel(1))).collect();
        let neg_re: Vec<f64> = vals.iter().map(|v| -v.0).collect();
        if neg_re.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Degenerate("symbol real part is not negative on the frequency range".into()));
        }
        let ratio: Vec<f64> = vals.iter().map(|v| v.1 / -v.0).collect();
        Ok(KernelTable {
            re: LogLogTable::new(&qs, &neg_re)?,
            im_ratio: MonotoneCubic::new(qs.iter().map(|q| q.ln()).collect(), ratio)?,
        })
    }

    fn eval(&self, q: f64) -> (f64, Option<f64>) {
        let r = -self.re.eval(q);
        (r, Some(-r * self.im_ratio.eval(q.ln())))
    }
}

impl SymbolGrid {
    pub fn compute(model: &LevyModel, lattice: &Lattice) -> Result<SymbolGrid> {
        if model.dim() != lattice.dim() {
            return Err(domain("model and lattice dimensions differ"));
        }
        let n = lattice.len();
        let probe = lattice.frequency(1.min(n - 1));
        let values: Vec<Complex64> = if closed_form(model, probe).is_some() {
            (0..n).into_par_iter().map(|i| symbol(model, lattice.frequency(i))).collect::<Result<_>>()?
        } else {
            // every |ξ·θ| on the lattice lies below √d·Nyquist; tiny projections use the power-law ends
            let q_max = lattice.nyquist() * (lattice.dim() as f64).sqrt() * 1.01;
            let q_min = 1e-3 / lattice.box_len();
            let table = KernelTable::new(model, q_min, q_max)?;
            (0..n)
                .into_par_iter()
                .map(|i| assemble(model, lattice.frequency(i), |q| table.eval(q)))
                .collect::<Result<_>>()?
        };
        Ok(SymbolGrid { lattice: lattice.clone(), values, model_id: model.describe() })
    }

    pub fn from_values(lattice: &Lattice, values: Vec<Complex64>, model_id: impl Into<String>) -> Result<SymbolGrid> {
        if values.len() != lattice.len() {
            return Err(Error::Input("symbol values do not match the lattice".into()));
        }
        Ok(SymbolGrid { lattice: lattice.clone(), values, model_id: model_id.into() })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    fn derived(&self, values: Vec<Complex64>, tag: String) -> SymbolGrid {
        SymbolGrid { lattice: self.lattice.clone(), values, model_id: format!("{}|{tag}", self.model_id) }
    }

    /// ψ^κ: 1 at κ = 0, ψ at κ = 1, −(−Re ψ)^κ in between.
    pub fn fractional(&self, kappa: f64) -> Result<SymbolGrid> {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(domain(format!("fractional order must lie in [0,1], got {kappa}")));
        }
        let v = if kappa == 0.0 {
            vec![Complex64::new(1.0, 0.0); self.values.len()]
        } else if kappa == 1.0 {
            self.values.clone()
        } else {
            self.values.iter().map(|p| Complex64::new(-(-p.re).max(0.0).powf(kappa), 0.0)).collect()
        };
        Ok(self.derived(v, format!("frac{kappa}")))
    }

    /// (a − Re ψ)^{sign·κ}.
    pub fn resolvent(&self, a: f64, kappa: f64, sign: i8) -> Result<SymbolGrid> {
        check_positive("a", a)?;
        if !(0.0..2.0).contains(&kappa) {
            return Err(domain(format!("resolvent order must lie in [0,2), got {kappa}")));
        }
        let e = kappa * f64::from(sign.signum());
        let v = self.values.iter().map(|p| Complex64::new((a - p.re).powf(e), 0.0)).collect();
        Ok(self.derived(v, format!("res{a},{e}")))
    }

    /// (a − ψ)^{±1} with the full complex symbol.
    pub fn resolvent_full(&self, a: f64, sign: i8) -> Result<SymbolGrid> {
        check_positive("a", a)?;
        let v = self
            .values
            .iter()
            .map(|p| if sign >= 0 { a - p } else { 1.0 / (a - p) })
            .collect();
        Ok(self.derived(v, format!("full{a},{sign}")))
    }

    /// Largest violation of ψ(−ξ) = conj ψ(ξ) over lattice pairs (Nyquist rows excluded).
    pub fn hermitian_defect(&self) -> f64 {
        let l = &self.lattice;
        (0..l.len())
            .filter_map(|n| {
                let k = l.modes(n);
                let m = l.mode_index([-k[0], -k[1]])?;
                Some((self.values[m] - self.values[n].conj()).norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(if self.lattice.dim() == 1 { "xi,re,im\n" } else { "xi,eta,re,im\n" });
        for (n, v) in self.values.iter().enumerate() {
            let f = self.lattice.frequency(n);
            if self.lattice.dim() == 1 {
                s.push_str(&format!("{:e},{:e},{:e}\n", f[0], v.re, v.im));
            } else {
                s.push_str(&format!("{:e},{:e},{:e},{:e}\n", f[0], f[1], v.re, v.im));
            }
        }
        s
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())
    }
}

pub fn fractional_symbol(g: &SymbolGrid, kappa: f64) -> Result<SymbolGrid> {
    g.fractional(kappa)
}

pub fn resolvent_symbol(g: &SymbolGrid, a: f64, kappa: f64, sign: i8) -> Result<SymbolGrid> {
    g.resolvent(a, kappa, sign)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolBounds {
    pub lower: f64,
    pub upper: f64,
    pub ratio: f64,
}

/// min and max over nonzero lattice ξ of (−Re ψ(ξ))·w(1/|ξ|).
pub fn check_symbol_bounds(g: &SymbolGrid, sf: &ScalingFunction) -> Result<SymbolBounds> {
    let l = g.lattice();
    let mut lower = f64::INFINITY;
    let mut upper = 0f64;
    for (n, v) in g.values().iter().enumerate() {
        let s = l.frequency_norm(n);
        if s == 0.0 {
            continue;
        }
        if !(-v.re > 0.0) {
            return Err(Error::Degenerate(format!("−Re ψ = {} at |ξ| = {s}", -v.re)));
        }
        let r = -v.re * sf.w_unchecked(1.0 / s);
        lower = lower.min(r);
        upper = upper.max(r);
    }
    Ok(SymbolBounds { lower, upper, ratio: upper / lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::BernsteinPhi;
    use crate::math::special::one_minus_cos_moment;
    use proptest::prelude::*;

    fn stable1(alpha: f64, plus: f64, minus: f64) -> LevyModel {
        LevyModel::stable(1, alpha, Angular::Line { plus, minus }).unwrap()
    }

    #[test]
    fn cosine_moment_oracle() {
        for a in [0.3, 0.5, 1.0, 1.5, 1.9] {
            let q = one_minus_cos_quadrature(a);
            assert!((q / one_minus_cos_moment(a) - 1.0).abs() < 1e-8, "α={a}: {q}");
        }
    }

    #[test]
    fn stable_closed_form_matches_quadrature() {
        for a in [0.5, 1.0, 1.5] {
            for (p, m) in [(1.0, 1.0), (1.0, 0.25)] {
                let model = stable1(a, p, m);
                for xi in [0.01, 0.7, 3.0, 250.0, -40.0] {
                    let c = symbol(&model, [xi, 0.0]).unwrap();
                    let (q, err) = symbol_with_error(&model, [xi, 0.0]).unwrap();
                    assert!((c - q).norm() <= 1e-6 * c.norm(), "α={a} ξ={xi}: {c} vs {q}");
                    assert!(err <= 1e-6 * c.norm());
                }
            }
        }
    }

    #[test]
    fn symmetric_stable_value() {
        let model = stable1(1.5, 1.0, 1.0);
        let xi = 2.0;
        let want = -2.0 * one_minus_cos_moment(1.5) * (TAU * xi).powf(1.5);
        let got = symbol(&model, [xi, 0.0]).unwrap();
        assert!((got.re / want - 1.0).abs() < 1e-13 && got.im == 0.0);
        assert_eq!(symbol(&model, [0.0, 0.0]).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn bernstein_closed_form_matches_table_quadrature() {
        for (k, p) in [(1u8, vec![0.5]), (2, vec![0.5, 0.4]), (3, vec![0.4, 0.3])] {
            let phi = BernsteinPhi::new(k, p).unwrap();
            let m = LevyModel::bernstein(1, phi, Angular::uniform(1)).unwrap();
            for xi in [0.05, 1.0, 30.0, 1000.0] {
                let c = symbol(&m, [xi, 0.0]).unwrap();
                let q = symbol_quadrature(&m, [xi, 0.0], QuadratureLevel(2)).unwrap();
                assert!((c - q).norm() <= 1e-4 * c.norm(), "kind {k} ξ={xi}: {c} {q}");
            }
        }
    }

    #[test]
    fn asymmetric_table_model_on_grid() {
        let phi = BernsteinPhi::new(2, vec![0.5, 0.4]).unwrap();
        let m = LevyModel::bernstein(1, phi, Angular::Line { plus: 1.0, minus: 0.5 }).unwrap();
        let l = Lattice::new(1, 1.0, 64).unwrap();
        let g = SymbolGrid::compute(&m, &l).unwrap();
        assert!(g.hermitian_defect() < 1e-12);
        for n in [1, 5, 20, 40] {
            let direct = symbol_quadrature(&m, l.frequency(n), QuadratureLevel(1)).unwrap();
            assert!((g.values()[n] - direct).norm() < 1e-6 * direct.norm(), "{n}");
            assert!(g.values()[n].re < 0.0);
        }
    }

    #[test]
    fn symmetrized_models_are_real() {
        let m = stable1(1.0, 1.0, 0.2).symmetrize();
        let l = Lattice::new(1, 1.0, 128).unwrap();
        let g = SymbolGrid::compute(&m, &l).unwrap();
        assert!(g.values().iter().all(|v| v.im.abs() <= 1e-12));
        let q = symbol_quadrature(&m, [3.0, 0.0], QuadratureLevel(1)).unwrap();
        assert!(q.im.abs() <= 1e-12);
    }

    #[test]
    fn fractional_and_resolvent_rules() {
        let m = stable1(1.5, 1.0, 0.5);
        let l = Lattice::new(1, 1.0, 64).unwrap();
        let g = SymbolGrid::compute(&m, &l).unwrap();
        assert!(g.fractional(0.0).unwrap().values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert_eq!(g.fractional(1.0).unwrap().values(), g.values());
        let half = g.fractional(0.5).unwrap();
        for (h, v) in half.values().iter().zip(g.values()) {
            assert!((h.re + (-v.re).sqrt()).abs() < 1e-12 && h.im == 0.0);
        }
        let up = g.resolvent(2.0, 0.7, 1).unwrap();
        let down = g.resolvent(2.0, 0.7, -1).unwrap();
        for (a, b) in up.values().iter().zip(down.values()) {
            assert!((a * b - 1.0).norm() < 1e-14);
        }
        assert!((up.values()[0].re - 2f64.powf(0.7)).abs() < 1e-15);
        assert!(g.resolvent(0.0, 0.5, 1).is_err() && g.fractional(1.5).is_err());
        let sym = SymbolGrid::compute(&m.symmetrize(), &l).unwrap();
        let r = sym.resolvent(1.0, 1.0, 1).unwrap();
        for (n, v) in r.values().iter().enumerate() {
            let xi = l.frequency(n)[0];
            let want = 1.0 + 0.75 * 2.0 * one_minus_cos_moment(1.5) * (TAU * xi.abs()).powf(1.5);
            assert!((v.re / want - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symbol_bounds_for_stable() {
        let sf = ScalingFunction::power(1.5).unwrap();
        let l = Lattice::new(1, 1.0, 256).unwrap();
        let g = SymbolGrid::compute(&stable1(1.5, 1.0, 1.0), &l).unwrap();
        let b = check_symbol_bounds(&g, &sf).unwrap();
        assert!((b.ratio - 1.0).abs() < 1e-12);
        let l2 = Lattice::new(2, 1.0, 32).unwrap();
        let m2 = LevyModel::stable(2, 1.2, Angular::uniform(2)).unwrap();
        let g2 = SymbolGrid::compute(&m2, &l2).unwrap();
        let b2 = check_symbol_bounds(&g2, &ScalingFunction::power(1.2).unwrap()).unwrap();
        assert!(b2.ratio <= 2.0, "{b2:?}");
        assert!(g2.hermitian_defect() < 1e-12);
    }

    #[test]
    fn scaling_identity() {
        let n = 4f64;
        for m in [stable1(1.5, 1.0, 0.5), stable1(1.0, 1.0, 1.0), stable1(0.6, 0.2, 1.0)] {
            let sf = ScalingFunction::power(m.order()).unwrap();
            for j in 1..=3 {
                let r = n.powi(-j);
                let scaled = m.rescaled(r, sf.w(r).unwrap());
                for xi in [0.3, 5.0, 77.0] {
                    let lhs = symbol(&m, [xi, 0.0]).unwrap();
                    let rhs = symbol(&scaled, [r * xi, 0.0]).unwrap() / sf.w(r).unwrap();
                    assert!((lhs - rhs).norm() <= 1e-6 * lhs.norm(), "{lhs} {rhs}");
                }
            }
        }
        let phi = BernsteinPhi::new(2, vec![0.5, 0.4]).unwrap();
        let b = LevyModel::bernstein(1, phi, Angular::uniform(1)).unwrap();
        let sf = ScalingFunction::induced(&b).unwrap();
        for j in 1..=3 {
            let r = n.powi(-j);
            let scaled = b.rescaled(r, sf.w(r).unwrap());
            let lhs = symbol(&b, [9.0, 0.0]).unwrap();
            let rhs = symbol(&scaled, [r * 9.0, 0.0]).unwrap() / sf.w(r).unwrap();
            assert!((lhs - rhs).norm() <= 1e-6 * lhs.norm());
        }
    }

    #[test]
    fn csv_export() {
        let l = Lattice::new(1, 1.0, 8).unwrap();
        let g = SymbolGrid::compute(&stable1(0.5, 1.0, 1.0), &l).unwrap();
        let csv = g.to_csv();
        assert!(csv.starts_with("xi,re,im\n"));
        assert_eq!(csv.lines().count(), 9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn symbol_invariants(a in 0.2f64..1.9, p in 0.0f64..2.0, m in 0.1f64..2.0, xi in -500.0f64..500.0) {
            let model = stable1(a, p, m);
            let v = symbol(&model, [xi, 0.0]).unwrap();
            let w = symbol(&model, [-xi, 0.0]).unwrap();
            prop_assert!(v.re <= 0.0);
            prop_assert!((v - w.conj()).norm() <= 1e-12 * v.norm().max(1e-300));
        }

        #[test]
        fn fractional_powers_add(k1 in 0.01f64..0.5, k2 in 0.01f64..0.5) {
            let l = Lattice::new(1, 1.0, 64).unwrap();
            let g = SymbolGrid::compute(&stable1(1.3, 1.0, 1.0), &l).unwrap();
            let (a, b, c) = (g.fractional(k1).unwrap(), g.fractional(k2).unwrap(), g.fractional(k1 + k2).unwrap());
            for ((x, y), z) in a.values().iter().zip(b.values()).zip(c.values()) {
                prop_assert!((x * y + z).norm() <= 1e-12 * z.norm().max(1.0));
            }
        }
    }
}
