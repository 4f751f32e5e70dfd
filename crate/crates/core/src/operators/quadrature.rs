//! Direct jump-integral quadrature of L^ν u at a point: the oracle for the spectral generator.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Result;
use crate::levy::{Cutoff, LevyModel};
use crate::lp::GridFunction;
use crate::math::quad::{self, gl16};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorQuadrature {
    pub value: Complex64,
    /// difference between two panel refinements
    pub error: f64,
    pub warning: Option<String>,
}

const TAYLOR_ORDER: usize = 6;

struct Line {
    /// a_k = c_k e^{i2πξ_k·x}
    amps: Vec<Complex64>,
    /// ω_k = 2π ξ_k·θ
    omegas: Vec<f64>,
}

impl Line {
    fn at(&self, r: f64) -> Complex64 {
        self.amps.iter().zip(&self.omegas).map(|(a, w)| a * Complex64::from_polar(1.0, w * r)).sum()
    }

    fn derivative(&self, n: usize) -> Complex64 {
        self.amps.iter().zip(&self.omegas).map(|(a, w)| a * Complex64::new(0.0, *w).powu(n as u32)).sum()
    }
}

fn cquad(rule: &quad::GaussRule, a: f64, b: f64, f: &impl Fn(f64) -> Complex64) -> Complex64 {
    rule.integrate_complex(a, b, f)
}

/// ∫₀^∞ [u(x+rθ) − u(x) − χ(r) r ∂_θu(x)] g(r) dr along one direction.
fn directional(model: &LevyModel, line: &Line, level: usize) -> Result<Complex64> {
    let g = |r: f64| model.radial_measure(r);
    let cutoff = model.cutoff();
    let w_max = line.omegas.iter().fold(0f64, |m, w| m.max(w.abs()));
    let u0 = line.at(0.0);
    let d1 = line.derivative(1);
    if w_max == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lv = level as f64;

    // Taylor region (0, r0)
    let r0 = (1e-2 / w_max).min(0.5);
    let chi0 = cutoff.weight(r0.min(1.0));
    let mut total = Complex64::new(0.0, 0.0);
    if chi0 < 1.0 {
        total += d1 * model.radial_integral(0.0, r0, 8.0, |r| r)?;
    }
    let mut fact = 1.0;
    for n in 2..=TAYLOR_ORDER {
        fact *= n as f64;
        let m = model.radial_integral(0.0, r0, 8.0, |r| r.powi(n as i32))?;
        total += line.derivative(n) * (m / fact);
    }

    let f = |r: f64| (line.at(r) - u0 - d1 * (cutoff.weight(r) * r)) * g(r);
    let r_osc = (2.0 * PI / w_max).max(r0);
    let mut cuts = vec![r0, r_osc];
    let far = (64.0 * 2.0 * PI / w_max).max(2.0 * r_osc).max(2.0);
    if cutoff == Cutoff::UnitBall && 1.0 > r0 && 1.0 < far {
        cuts.push(1.0);
    }
    cuts.push(far);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    for s in cuts.windows(2) {
        let (a, b) = (s[0], s[1]);
        if b <= r_osc {
            // log panels: the integrand is still singular-looking but slowly oscillating
            let (la, lb) = (a.ln(), b.ln());
            let panels = (((lb - la) / std::f64::consts::LN_10) * 16.0 * lv).ceil().max(1.0) as usize;
            let h = (lb - la) / panels as f64;
            for p in 0..panels {
                let t0 = la + h * p as f64;
                total += cquad(gl16(), t0, t0 + h, &|t: f64| {
                    let r = t.exp();
                    f(r) * r
                });
            }
        } else {
            let panels = (((b - a) * w_max / PI).ceil() * lv).max(1.0) as usize;
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let x0 = a + h * p as f64;
                total += cquad(gl16(), x0, x0 + h, &f);
            }
        }
    }

    // tail beyond `far`: non-oscillatory masses plus per-mode integration by parts
    let g0 = model.radial_integral(far, f64::INFINITY, 4.0, |_| 1.0)?;
    total -= u0 * g0;
    if cutoff == Cutoff::All {
        total -= d1 * model.radial_integral(far, f64::INFINITY, 4.0, |r| r)?;
    }
    for (a, &w) in line.amps.iter().zip(&line.omegas) {
        if w == 0.0 {
            total += a * g0;
        } else if w.abs() * far >= 100.0 {
            total += a * oscillatory_tail(&g, far, w);
        } else {
            // slow modes: log panels out to where the expansion is accurate
            let end = 100.0 / w.abs();
            let (la, lb) = (far.ln(), end.ln());
            let panels = (((lb - la) / std::f64::consts::LN_10) * 32.0 * lv).ceil().max(1.0) as usize;
            let h = (lb - la) / panels as f64;
            let mut part = Complex64::new(0.0, 0.0);
            for p in 0..panels {
                let t0 = la + h * p as f64;
                part += cquad(gl16(), t0, t0 + h, &|t: f64| {
                    let r = t.exp();
                    Complex64::from_polar(g(r) * r, w * r)
                });
            }
            total += a * (part + oscillatory_tail(&g, end, w));
        }
    }
    Ok(total)
}

/// ∫_R^∞ e^{iωr} g(r) dr by repeated integration by parts, derivatives of g from its local power law.
fn oscillatory_tail(g: &impl Fn(f64) -> f64, big: f64, w: f64) -> Complex64 {
    let mut gm = |r: f64| g(r);
    let p = quad::log_slope(&mut gm, big, 1.0).unwrap_or(-2.0);
    let gf = g(big);
    let derivs = [gf, p * gf / big, p * (p - 1.0) * gf / (big * big), p * (p - 1.0) * (p - 2.0) * gf / big.powi(3)];
    let iw = Complex64::new(0.0, w);
    let mut s = Complex64::new(0.0, 0.0);
    let mut pow = iw;
    for (n, d) in derivs.iter().enumerate() {
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        s += sign * d / pow;
        pow *= iw;
    }
    Complex64::from_polar(1.0, w * big) * s
}

fn evaluate(u: &GridFunction, model: &LevyModel, x: [f64; 2], level: usize) -> Result<Complex64> {
    let trig = u.to_trig(0.0);
    let scale = trig.modes().iter().fold(0f64, |m, (_, c)| m.max(c.norm()));
    let kept: Vec<usize> = (0..trig.modes().len()).filter(|&i| trig.modes()[i].1.norm() > 1e-14 * scale).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (theta, mass) in model.angular().atoms() {
        if mass == 0.0 {
            continue;
        }
        let mut amps = Vec::with_capacity(kept.len());
        let mut omegas = Vec::with_capacity(kept.len());
        for &i in &kept {
            let xi = trig.frequency(i);
            let c = trig.modes()[i].1;
            amps.push(c * Complex64::from_polar(1.0, 2.0 * PI * (xi[0] * x[0] + xi[1] * x[1])));
            omegas.push(2.0 * PI * (xi[0] * theta[0] + xi[1] * theta[1]));
        }
        total += mass * directional(model, &Line { amps, omegas }, level)?;
    }
    Ok(total)
}

/// L^ν u(x) by radial-angular quadrature of the jump integral, with a Taylor expansion
/// on the innermost radii and an integration-by-parts tail.
pub fn generator_quadrature(u: &GridFunction, model: &LevyModel, x: [f64; 2]) -> Result<GeneratorQuadrature> {
    let coarse = evaluate(u, model, x, 1)?;
    let fine = evaluate(u, model, x, 2)?;
    let error = (fine - coarse).norm();
    let warning = (error > 1e-6 * fine.norm().max(u.sup_norm() * 1e-3))
        .then(|| format!("quadrature refinement moved the value by {error:e}"));
    Ok(GeneratorQuadrature { value: fine, error, warning })
}
