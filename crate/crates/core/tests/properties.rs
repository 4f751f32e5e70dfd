//! Cross-module invariants as property tests.

use num_complex::Complex64;
use proptest::prelude::*;

use levyspace::levy::{Angular, LevyModel};
use levyspace::lp::{besov_norm, DyadicBank, GridFunction, Lattice, TrigPoly};
use levyspace::operators::{apply_fractional, apply_generator, apply_resolvent_power};
use levyspace::scaling::ScalingFunction;
use levyspace::solver::{solve_spectral, Forcing};
use levyspace::symbol::{symbol, SymbolGrid};

fn lattice() -> Lattice {
    Lattice::new(1, 1.0, 256).unwrap()
}

fn poly(l: &Lattice, coeffs: &[(i64, f64, f64)]) -> GridFunction {
    TrigPoly::new(1, l.box_len(), coeffs.iter().map(|&(k, re, im)| ([k, 0], Complex64::new(re, im))).collect()).to_grid(l)
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, f64, f64)>> {
    prop::collection::vec((-100i64..100, -1.0f64..1.0, -1.0f64..1.0), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stable_symbol_is_homogeneous_and_hermitian(a in 0.3f64..1.9, plus in 0.1f64..2.0, minus in 0.1f64..2.0, xi in 0.01f64..300.0, r in 0.1f64..10.0) {
        prop_assume!((a - 1.0).abs() > 1e-3);
        let m = LevyModel::stable(1, a, Angular::Line { plus, minus }).unwrap();
        let p = symbol(&m, [xi, 0.0]).unwrap();
        let q = symbol(&m, [r * xi, 0.0]).unwrap();
        prop_assert!((q - p * r.powf(a)).norm() <= 1e-10 * q.norm());
        let n = symbol(&m, [-xi, 0.0]).unwrap();
        prop_assert!((n - p.conj()).norm() <= 1e-12 * p.norm());
        prop_assert!(p.re < 0.0);
    }

    #[test]
    fn solver_is_linear(f in coeffs(), g in coeffs(), s in -3.0f64..3.0) {
        let l = lattice();
        let sym = SymbolGrid::compute(&LevyModel::stable(1, 1.2, Angular::Line { plus: 1.0, minus: 0.4 }).unwrap(), &l).unwrap();
        let (u, v) = (poly(&l, &f), poly(&l, &g));
        let solve = |w: &GridFunction| solve_spectral(&Forcing::Constant(w.clone()), &sym, 0.5, 1.0, 16).unwrap().states.pop().unwrap();
        let lhs = solve(&u.add(&v.scaled(Complex64::new(s, 0.0))));
        let rhs = solve(&u).add(&solve(&v).scaled(Complex64::new(s, 0.0)));
        prop_assert!(lhs.sub(&rhs).sup_norm() <= 1e-12 * (1.0 + rhs.sup_norm()));
    }

    #[test]
    fn besov_norm_is_a_seminorm(f in coeffs(), g in coeffs(), s in -5.0f64..5.0, beta in 0.1f64..1.5) {
        let l = lattice();
        let bank = DyadicBank::new(4.0, &l, None).unwrap();
        let sf = ScalingFunction::power(1.5).unwrap();
        let (u, v) = (poly(&l, &f), poly(&l, &g));
        let nu = besov_norm(&u, &bank, &sf, beta).unwrap();
        let nv = besov_norm(&v, &bank, &sf, beta).unwrap();
        let scaled = besov_norm(&u.scaled(Complex64::new(s, 0.0)), &bank, &sf, beta).unwrap();
        prop_assert!((scaled - s.abs() * nu).abs() <= 1e-12 * (1.0 + nu));
        let sum = besov_norm(&u.add(&v), &bank, &sf, beta).unwrap();
        prop_assert!(sum <= (nu + nv) * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn operators_commute(f in coeffs(), k in 0.05f64..1.0, a in 0.1f64..5.0) {
        let l = lattice();
        let g = SymbolGrid::compute(&LevyModel::stable(1, 0.8, Angular::uniform(1)).unwrap(), &l).unwrap();
        let u = poly(&l, &f);
        let ab = apply_fractional(&apply_resolvent_power(&u, &g, a, k, -1).unwrap(), &g, k).unwrap();
        let ba = apply_resolvent_power(&apply_fractional(&u, &g, k).unwrap(), &g, a, k, -1).unwrap();
        prop_assert!(ab.sub(&ba).sup_norm() <= 1e-10 * (1.0 + ab.sup_norm()));
        // the generator annihilates constants
        let one = GridFunction::constant(&l, Complex64::new(1.0, 0.0));
        prop_assert!(apply_generator(&one, &g).unwrap().sup_norm() <= 1e-14);
    }
}
