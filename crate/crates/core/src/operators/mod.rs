//! Nonlocal operators L^ν, L^{ν,κ} and (aI − L^ν)^{±κ} on grid functions.
//!
//! Production paths are spectral. The quadrature and Monte Carlo modules are independent
//! oracles for the same operators.

mod mc;
mod quadrature;

pub use mc::{
    probabilistic_fractional, probabilistic_resolvent_power, probe_points, resolvent_via_expectation, McConfig,
    McField, ProbeEstimate,
};
pub use quadrature::{generator_quadrature, GeneratorQuadrature};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lp::{DyadicBank, GridFunction};
use crate::math::quad;
use crate::math::special::gamma;
use crate::scaling::ScalingFunction;
use crate::symbol::SymbolGrid;

fn check(u: &GridFunction, g: &SymbolGrid) -> Result<()> {
    if u.lattice() != g.lattice() {
        return Err(domain("function and symbol live on different lattices"));
    }
    Ok(())
}

/// L^ν u: the spectrum multiplied by ψ.
pub fn apply_generator(u: &GridFunction, g: &SymbolGrid) -> Result<GridFunction> {
    check(u, g)?;
    Ok(u.apply_multiplier(g.values()))
}

/// L^{ν,κ} u for κ ∈ [0, 2); orders above one are two applications of order κ/2.
pub fn apply_fractional(u: &GridFunction, g: &SymbolGrid, kappa: f64) -> Result<GridFunction> {
    check(u, g)?;
    if !(0.0..2.0).contains(&kappa) {
        return Err(domain(format!("fractional order must lie in [0,2), got {kappa}")));
    }
    if kappa > 1.0 {
        let m = g.fractional(kappa / 2.0)?;
        return Ok(u.apply_multiplier(m.values()).apply_multiplier(m.values()));
    }
    if kappa == 0.0 {
        return Ok(u.clone());
    }
    Ok(u.apply_multiplier(g.fractional(kappa)?.values()))
}

/// (aI − L^ν)^{sign·κ} u with the multiplier (a − Re ψ)^{sign·κ}.
pub fn apply_resolvent_power(u: &GridFunction, g: &SymbolGrid, a: f64, kappa: f64, sign: i8) -> Result<GridFunction> {
    check(u, g)?;
    if kappa == 0.0 {
        return Ok(u.clone());
    }
    Ok(u.apply_multiplier(g.resolvent(a, kappa, sign)?.values()))
}

/// (aI − L^ν)^{±1} u with the full complex symbol.
pub fn apply_resolvent_full(u: &GridFunction, g: &SymbolGrid, a: f64, sign: i8) -> Result<GridFunction> {
    check(u, g)?;
    Ok(u.apply_multiplier(g.resolvent_full(a, sign)?.values()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorForm {
    Generator,
    FractionalPower,
    ResolventPower { sign: i8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub model_id: String,
    pub kappa: f64,
    pub a: f64,
    pub form: OperatorForm,
}

impl OperatorSpec {
    pub fn apply(&self, u: &GridFunction, g: &SymbolGrid) -> Result<GridFunction> {
        if g.model_id() != self.model_id {
            return Err(Error::Input(format!("operator built for {} but symbol is {}", self.model_id, g.model_id())));
        }
        match self.form {
            OperatorForm::Generator => apply_generator(u, g),
            OperatorForm::FractionalPower => apply_fractional(u, g, self.kappa),
            OperatorForm::ResolventPower { sign } => apply_resolvent_power(u, g, self.a, self.kappa, sign),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subordination {
    /// ∫₀^∞ t^{−κ−1}(1 − e^{−t}) dt = Γ(1−κ)/κ
    Fractional,
    /// ∫₀^∞ t^{κ−1} e^{−t} dt = Γ(κ)
    Resolvent,
}

/// The normalizing integral of a subordination formula, by quadrature.
pub fn subordination_constant(kappa: f64, which: Subordination) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(domain(format!("subordination order must lie in (0,1), got {kappa}")));
    }
    let (lo, hi) = (1e-14, 800.0);
    let body = match which {
        Subordination::Fractional => quad::log_panels(quad::gl16(), lo, hi, 6.0, |t| -(-t).exp_m1() * t.powf(-kappa - 1.0)),
        Subordination::Resolvent => quad::log_panels(quad::gl16(), lo, hi, 6.0, |t| (-t).exp() * t.powf(kappa - 1.0)),
    };
    // series of the integrand on (0, lo) and the algebraic tail past hi
    let tails = match which {
        Subordination::Fractional => lo.powf(1.0 - kappa) / (1.0 - kappa) - 0.5 * lo.powf(2.0 - kappa) / (2.0 - kappa) + hi.powf(-kappa) / kappa,
        Subordination::Resolvent => lo.powf(kappa) / kappa - lo.powf(kappa + 1.0) / (kappa + 1.0),
    };
    Ok(body + tails)
}

/// Closed form of [`subordination_constant`].
pub fn subordination_identity(kappa: f64, which: Subordination) -> f64 {
    match which {
        Subordination::Fractional => gamma(1.0 - kappa) / kappa,
        Subordination::Resolvent => gamma(kappa),
    }
}

/// w(N^{−j})^κ times the lattice L¹ norm of L^{ν,κ} applied to the band-j kernel, for j = 1..=j_max.
pub fn band_operator_l1(g: &SymbolGrid, bank: &DyadicBank, sf: &ScalingFunction, kappa: f64) -> Result<Vec<f64>> {
    if g.lattice() != bank.lattice() {
        return Err(domain("symbol and bank live on different lattices"));
    }
    let m = g.lattice().len() as f64;
    let mult: Vec<Complex64> = if kappa > 1.0 {
        g.fractional(kappa / 2.0)?.values().iter().map(|f| f * f).collect()
    } else {
        g.fractional(kappa)?.values().to_vec()
    };
    (1..=bank.j_max())
        .map(|j| {
            let spec: Vec<Complex64> = bank.multiplier(j).iter().zip(&mult).map(|(p, f)| f * p).collect();
            let k = g.lattice().inverse(&spec);
            let l1 = k.iter().map(|v| v.norm()).sum::<f64>() / m;
            Ok(l1 * sf.w(bank.base().powi(-(j as i32)))?.powf(kappa))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{Angular, LevyModel};
    use crate::lp::{Lattice, TrigPoly};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn setup(plus: f64, minus: f64) -> (Lattice, SymbolGrid) {
        let l = Lattice::new(1, 1.0, 256).unwrap();
        let m = LevyModel::stable(1, 1.5, Angular::Line { plus, minus }).unwrap();
        let g = SymbolGrid::compute(&m, &l).unwrap();
        (l, g)
    }

    fn family(l: &Lattice) -> GridFunction {
        TrigPoly::new(1, 1.0, vec![([0, 0], c(0.3)), ([1, 0], c(0.5)), ([-1, 0], c(0.5)), ([5, 0], Complex64::new(0.2, 0.1)), ([-5, 0], Complex64::new(0.2, -0.1))])
            .to_grid(l)
    }

    #[test]
    fn subordination_constants() {
        for k in [0.25, 0.5, 0.75] {
            for w in [Subordination::Fractional, Subordination::Resolvent] {
                let q = subordination_constant(k, w).unwrap();
                assert!((q / subordination_identity(k, w) - 1.0).abs() < 1e-8, "{k} {w:?} {q}");
            }
        }
        let f = subordination_constant(0.5, Subordination::Fractional).unwrap();
        assert!((f - 2.0 * PI.sqrt()).abs() < 1e-8);
        let r = subordination_constant(0.5, Subordination::Resolvent).unwrap();
        assert!((r - PI.sqrt()).abs() < 1e-9);
        assert!(subordination_constant(1.0, Subordination::Fractional).is_err());
        assert!(subordination_constant(0.0, Subordination::Resolvent).is_err());
    }

    #[test]
    fn eigenrelations_on_modes() {
        let (l, g) = setup(1.0, 0.4);
        for k in [1i64, 7, -30] {
            let u = GridFunction::mode(&l, [k, 0], c(1.0));
            let n = l.mode_index([k, 0]).unwrap();
            let psi = g.values()[n];
            let lu = apply_generator(&u, &g).unwrap();
            assert!(lu.sub(&u.scaled(psi)).sup_norm() <= 1e-12 * psi.norm());
            let f = apply_fractional(&u, &g, 0.3).unwrap();
            let want = -(-psi.re).powf(0.3);
            assert!(f.sub(&u.scaled(c(want))).sup_norm() <= 1e-12 * want.abs());
            let r = apply_resolvent_power(&u, &g, 2.0, 0.6, -1).unwrap();
            let want = (2.0 - psi.re).powf(-0.6);
            assert!(r.sub(&u.scaled(c(want))).sup_norm() <= 1e-13);
            let full = apply_resolvent_full(&u, &g, 1.0, 1).unwrap();
            assert!(full.sub(&u.scaled(1.0 - psi)).sup_norm() <= 1e-12 * psi.norm());
        }
    }

    #[test]
    fn constants_are_annihilated() {
        let (l, g) = setup(1.0, 1.0);
        let u = GridFunction::constant(&l, c(2.5));
        assert!(apply_generator(&u, &g).unwrap().sup_norm() < 1e-14);
        assert!(apply_fractional(&u, &g, 0.5).unwrap().sup_norm() < 1e-14);
    }

    #[test]
    fn power_identities() {
        let (l, g) = setup(1.0, 1.0);
        let u = family(&l);
        // two half powers multiply to (−ψ)^{1/2}·(−ψ)^{1/2} = −ψ
        let half = apply_fractional(&apply_fractional(&u, &g, 0.5).unwrap(), &g, 0.5).unwrap();
        let one = apply_fractional(&u, &g, 1.0).unwrap();
        assert!(half.add(&one).sup_norm() <= 1e-10 * one.sup_norm());
        let up = apply_resolvent_power(&u, &g, 1.5, 0.8, 1).unwrap();
        let back = apply_resolvent_power(&up, &g, 1.5, 0.8, -1).unwrap();
        assert!(back.sub(&u).sup_norm() <= 1e-10);
        // κ > 1 is the composition of two κ/2 powers: multiplier (−Re ψ)^κ
        let composed = apply_fractional(&u, &g, 1.4).unwrap();
        let single: Vec<Complex64> = g.values().iter().map(|p| c((-p.re).powf(1.4))).collect();
        let direct = u.apply_multiplier(&single);
        assert!(composed.sub(&direct).sup_norm() <= 1e-12 * direct.sup_norm());
        assert!(apply_fractional(&u, &g, 2.0).is_err());
    }

    #[test]
    fn symmetric_real_and_maximum_principle() {
        let (l, g) = setup(1.0, 1.0);
        let u = TrigPoly::new(1, 1.0, vec![([1, 0], c(0.5)), ([-1, 0], c(0.5)), ([2, 0], c(0.2)), ([-2, 0], c(0.2))]).to_grid(&l);
        let lu = apply_generator(&u, &g).unwrap();
        let psi_max = g.values().iter().fold(0f64, |m, p| m.max(p.norm()));
        assert!(lu.max_imag() <= 1e-14 * psi_max * u.sup_norm());
        let peak = (0..l.len()).max_by(|&a, &b| u.values()[a].re.total_cmp(&u.values()[b].re)).unwrap();
        assert!(lu.values()[peak].re < 0.0);
    }

    #[test]
    fn operator_spec_dispatch() {
        let (l, g) = setup(1.0, 1.0);
        let u = family(&l);
        let spec = OperatorSpec { model_id: g.model_id().into(), kappa: 0.5, a: 1.0, form: OperatorForm::ResolventPower { sign: 1 } };
        let a = spec.apply(&u, &g).unwrap();
        let b = apply_resolvent_power(&u, &g, 1.0, 0.5, 1).unwrap();
        assert_eq!(a, b);
        let wrong = OperatorSpec { model_id: "other".into(), ..spec };
        assert!(wrong.apply(&u, &g).is_err());
    }

    #[test]
    fn band_l1_uniform_in_scale() {
        let l = Lattice::new(1, 1.0, 4096).unwrap();
        let bank = DyadicBank::new(4.0, &l, None).unwrap();
        let m = LevyModel::stable(1, 1.5, Angular::uniform(1)).unwrap();
        let g = SymbolGrid::compute(&m, &l).unwrap();
        let sf = ScalingFunction::power(1.5).unwrap();
        for kappa in [0.5, 1.0, 1.5] {
            let v = band_operator_l1(&g, &bank, &sf, kappa).unwrap();
            let (lo, hi) = v.iter().fold((f64::INFINITY, 0f64), |(a, b), x| (a.min(*x), b.max(*x)));
            assert!(hi / lo <= 4.0, "κ={kappa}: {v:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn resolvent_powers_multiply(a in 0.1f64..5.0, k1 in 0.05f64..0.9, k2 in 0.05f64..0.9) {
            let (_, g) = setup(1.0, 0.3);
            let (x, y, z) = (g.resolvent(a, k1, 1).unwrap(), g.resolvent(a, k2, 1).unwrap(), g.resolvent(a, k1 + k2, 1).unwrap());
            for ((p, q), r) in x.values().iter().zip(y.values()).zip(z.values()) {
                prop_assert!((p * q - r).norm() <= 1e-12 * r.norm());
            }
        }
    }
}
