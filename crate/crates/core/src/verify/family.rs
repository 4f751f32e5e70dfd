//! Band-limited real test families, defined as trigonometric polynomials so that the same
//! member can be sampled on a lattice and on its refinement.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;

use crate::lp::TrigPoly;
use crate::rng::stream;

/// Modes drawn per band and member.
const MODES_PER_BAND: usize = 2;

/// `count` real trigonometric polynomials with two random modes in each band j = 0..=j_top
/// (|ξ| ∈ [N^{j−1}, N^j], and |ξ| ≤ 1 for j = 0) plus a constant term. Band-j amplitudes are
/// `band_weight(j)` times a uniform factor in [0.2, 1].
///
/// The first members isolate single scales: member 0 is a constant and member 1 + j carries
/// band j alone. Constants are the extremal inputs for the sup-in-time bounds, and single-band
/// inputs keep one scale from masking another inside a sup over bands.
pub fn band_limited_family(
    dim: usize,
    box_len: f64,
    base: f64,
    j_top: usize,
    count: usize,
    seed: u64,
    band_weight: impl Fn(usize) -> f64,
) -> Vec<TrigPoly> {
    (0..count)
        .map(|i| {
            let mut rng = stream(seed, 1_000_000 + i as u64);
            let c0 = band_weight(0) * rng.gen_range(0.2..1.0);
            let only = match i {
                0 => return TrigPoly::new(dim, box_len, vec![([0, 0], Complex64::new(c0, 0.0))]),
                i if i <= j_top + 1 => Some(i - 1),
                _ => None,
            };
            let mut modes: Vec<([i64; 2], Complex64)> = if only.is_some() { vec![] } else { vec![([0, 0], Complex64::new(c0, 0.0))] };
            for j in 0..=j_top {
                if only.is_some_and(|o| o != j) {
                    continue;
                }
                let (lo, hi) = if j == 0 { (1.0 / box_len, 1.0) } else { (base.powi(j as i32 - 1), base.powi(j as i32)) };
                for _ in 0..MODES_PER_BAND {
                    let r = rng.gen_range(lo.max(1.0 / box_len)..=hi.max(1.0 / box_len));
                    let k = if dim == 1 {
                        [((r * box_len).round() as i64).max(1), 0]
                    } else {
                        let th = rng.gen_range(0.0..TAU);
                        let k = [(r * box_len * th.cos()).round() as i64, (r * box_len * th.sin()).round() as i64];
                        if k == [0, 0] {
                            [1, 0]
                        } else {
                            k
                        }
                    };
                    let amp = band_weight(j) * rng.gen_range(0.2..1.0);
                    let c = Complex64::from_polar(0.5 * amp, rng.gen_range(0.0..TAU));
                    modes.push((k, c));
                    modes.push(([-k[0], -k[1]], c.conj()));
                }
            }
            merge(dim, box_len, modes)
        })
        .collect()
}

fn merge(dim: usize, box_len: f64, modes: Vec<([i64; 2], Complex64)>) -> TrigPoly {
    let mut out: Vec<([i64; 2], Complex64)> = Vec::new();
    for (k, c) in modes {
        match out.iter_mut().find(|(q, _)| *q == k) {
            Some(e) => e.1 += c,
            None => out.push((k, c)),
        }
    }
    TrigPoly::new(dim, box_len, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{DyadicBank, Lattice};

    #[test]
    fn members_are_real_band_limited_and_reproducible() {
        let fam = band_limited_family(1, 1.0, 4.0, 2, 5, 42, |j| 4f64.powi(-(j as i32)));
        assert_eq!(fam, band_limited_family(1, 1.0, 4.0, 2, 5, 42, |j| 4f64.powi(-(j as i32))));
        let l = Lattice::new(1, 1.0, 4096).unwrap();
        let bank = DyadicBank::new(4.0, &l, None).unwrap();
        for p in &fam {
            let u = p.to_grid(&l);
            assert!(u.max_imag() < 1e-12);
            assert!(p.modes().iter().all(|(k, _)| k[0].abs() <= 16));
            let bands = bank.band_sup_norms(&u).unwrap();
            assert!(bands.len() > 4 && bands[4..].iter().all(|b| *b < 1e-12));
        }
        let fam2 = band_limited_family(2, 1.0, 4.0, 2, 3, 1, |_| 1.0);
        let l2 = Lattice::new(2, 1.0, 64).unwrap();
        assert!(fam2.iter().all(|p| p.to_grid(&l2).max_imag() < 1e-12));
    }
}
