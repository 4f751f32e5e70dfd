//! Base-N Littlewood–Paley bank: ℱφ_j on annuli N^{j−1} ≤ |ξ| ≤ N^{j+1}, summing to one.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::GridFunction;
use super::lattice::Lattice;
use crate::error::{config, domain, Result};

/// Smooth cutoff: 1 on s ≤ 1, 0 on s ≥ N, exp(−1/x) transition in ln s / ln N.
#[inline]
pub fn eta(base: f64, s: f64) -> f64 {
    if s <= 1.0 {
        return 1.0;
    }
    if s >= base {
        return 0.0;
    }
    let tau = s.ln() / base.ln();
    let a = (-1.0 / (1.0 - tau)).exp();
    let b = (-1.0 / tau).exp();
    a / (a + b)
}

/// ℱφ(ξ) = η(|ξ|) − η(N|ξ|), supported on 1/N ≤ |ξ| ≤ N.
#[inline]
pub fn annulus(base: f64, s: f64) -> f64 {
    eta(base, s) - eta(base, base * s)
}

/// ℱφ_j at |ξ| = s.
#[inline]
pub fn band(base: f64, j: usize, s: f64) -> f64 {
    if j == 0 {
        eta(base, s)
    } else {
        let nj = base.powi(j as i32);
        eta(base, s / nj) - eta(base, s * base / nj)
    }
}

/// ℱφ̃_j at |ξ| = s; equal to one on the support of ℱφ_j.
#[inline]
pub fn band_companion(base: f64, j: usize, s: f64) -> f64 {
    if j == 0 {
        eta(base, s / base)
    } else {
        let nj = base.powi(j as i32);
        eta(base, s / (nj * base)) - eta(base, s * base * base / nj)
    }
}

#[derive(Debug, Clone)]
pub struct DyadicBank {
    base: f64,
    lattice: Lattice,
    j_max: usize,
    phi: Vec<Vec<f64>>,
    phi_tilde: Vec<Vec<f64>>,
}

impl DyadicBank {
    /// Bank on `lattice`; `j_max` defaults to the largest j with N^{j+1} ≤ Nyquist.
    pub fn new(base: f64, lattice: &Lattice, j_max: Option<usize>) -> Result<DyadicBank> {
        if !(base > 3.0 && base.is_finite()) {
            return Err(domain(format!("bank base must exceed 3, got {base}")));
        }
        let top = lattice.max_band(base).filter(|&j| j >= 1).ok_or_else(|| {
            config(
                "bank",
                format!("lattice Nyquist {} is below N² = {}; refine the lattice", lattice.nyquist(), base * base),
            )
        })?;
        let j_max = match j_max {
            Some(j) if j == 0 || j > top => {
                return Err(config("bank.j_max", format!("must lie in 1..={top} on this lattice, got {j}")))
            }
            Some(j) => j,
            None => top,
        };
        let norms: Vec<f64> = (0..lattice.len()).map(|n| lattice.frequency_norm(n)).collect();
        let phi = (0..=j_max)
            .into_par_iter()
            .map(|j| norms.iter().map(|&s| band(base, j, s)).collect())
            .collect();
        let phi_tilde = (0..=j_max)
            .into_par_iter()
            .map(|j| norms.iter().map(|&s| band_companion(base, j, s)).collect())
            .collect();
        Ok(DyadicBank { base, lattice: lattice.clone(), j_max, phi, phi_tilde })
    }

    pub fn base(&self) -> f64 {
        self.base
    }
    pub fn j_max(&self) -> usize {
        self.j_max
    }
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    pub fn multiplier(&self, j: usize) -> &[f64] {
        &self.phi[j]
    }
    pub fn companion(&self, j: usize) -> &[f64] {
        &self.phi_tilde[j]
    }

    fn check(&self, u: &GridFunction, j: usize) -> Result<()> {
        if j > self.j_max {
            return Err(domain(format!("band {j} exceeds j_max = {}", self.j_max)));
        }
        if u.lattice() != &self.lattice {
            return Err(domain("function and bank live on different lattices"));
        }
        Ok(())
    }

    /// u ∗ φ_j.
    pub fn project(&self, u: &GridFunction, j: usize) -> Result<GridFunction> {
        self.check(u, j)?;
        Ok(u.apply_real_multiplier(&self.phi[j]))
    }

    /// u ∗ φ̃_j.
    pub fn project_companion(&self, u: &GridFunction, j: usize) -> Result<GridFunction> {
        self.check(u, j)?;
        Ok(u.apply_real_multiplier(&self.phi_tilde[j]))
    }

    /// All band projections from one forward transform.
    pub fn decompose(&self, u: &GridFunction) -> Result<Vec<GridFunction>> {
        self.check(u, 0)?;
        let c = u.spectrum();
        Ok((0..=self.j_max)
            .into_par_iter()
            .map(|j| {
                let cj: Vec<Complex64> = c.iter().zip(&self.phi[j]).map(|(a, b)| a * b).collect();
                GridFunction::from_spectrum(&self.lattice, &cj)
            })
            .collect())
    }

    /// Sup-norms |u ∗ φ_j|₀ for every band.
    pub fn band_sup_norms(&self, u: &GridFunction) -> Result<Vec<f64>> {
        Ok(self.decompose(u)?.iter().map(|g| g.sup_norm()).collect())
    }

    /// max_ξ |Σ_j ℱφ_j(ξ) − 1| over lattice ξ with |ξ| ≤ N^{j_max}.
    pub fn partition_defect(&self) -> f64 {
        let lim = self.base.powi(self.j_max as i32);
        (0..self.lattice.len())
            .filter(|&n| self.lattice.frequency_norm(n) <= lim)
            .map(|n| ((0..=self.j_max).map(|j| self.phi[j][n]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Lattice L¹ norm of the band kernel: (1/M^d) Σ_n |IDFT(ℱφ_j)_n|, the exact
    /// sup-norm operator bound of the band projection on the lattice.
    pub fn kernel_l1(&self, j: usize) -> f64 {
        let c: Vec<Complex64> = self.phi[j].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let k = self.lattice.inverse(&c);
        k.iter().map(|v| v.norm()).sum::<f64>() / self.lattice.len() as f64
    }

    pub fn companion_kernel_l1(&self, j: usize) -> f64 {
        let c: Vec<Complex64> = self.phi_tilde[j].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let k = self.lattice.inverse(&c);
        k.iter().map(|v| v.norm()).sum::<f64>() / self.lattice.len() as f64
    }

    pub fn max_kernel_l1(&self) -> f64 {
        (0..=self.j_max).map(|j| self.kernel_l1(j)).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::interp::logspace;

    fn bank() -> DyadicBank {
        DyadicBank::new(4.0, &Lattice::new(1, 1.0, 4096).unwrap(), None).unwrap()
    }

    #[test]
    fn partition_of_unity() {
        let b = bank();
        assert_eq!(b.j_max(), 4);
        assert!(b.partition_defect() <= 1e-12);
    }

    #[test]
    fn supports() {
        let b = bank();
        let l = b.lattice();
        for j in 1..=b.j_max() {
            let (lo, hi) = (4f64.powi(j as i32 - 1), 4f64.powi(j as i32 + 1));
            for n in 0..l.len() {
                let s = l.frequency_norm(n);
                if s < lo || s > hi {
                    assert_eq!(b.multiplier(j)[n], 0.0, "j={j} |ξ|={s}");
                }
                let v = b.multiplier(j)[n];
                assert_eq!(v * b.companion(j)[n], v);
            }
        }
    }

    #[test]
    fn companion_is_three_dilations() {
        let n = 4.0;
        for s in logspace(1e-3, 1e3, 301) {
            let want = annulus(n, n * s) + annulus(n, s) + annulus(n, s / n);
            assert!((band_companion(n, 1, n * s) - want).abs() < 1e-15, "{s}");
            assert!((annulus(n, s) - band(n, 1, n * s)).abs() < 1e-15);
        }
    }

    #[test]
    fn eta_is_monotone_and_smooth_at_ends() {
        let n = 4.0;
        let s = logspace(0.5, 8.0, 500);
        for w in s.windows(2) {
            assert!(eta(n, w[1]) <= eta(n, w[0]));
        }
        assert!(1.0 - eta(n, 1.0 + 1e-3) < 1e-100);
    }

    #[test]
    fn too_coarse_lattice_is_a_config_error() {
        let l = Lattice::new(1, 64.0, 256).unwrap();
        assert!(matches!(DyadicBank::new(4.0, &l, None), Err(crate::Error::Config { .. })));
        assert!(DyadicBank::new(3.0, &Lattice::new(1, 1.0, 4096).unwrap(), None).is_err());
        assert!(DyadicBank::new(4.0, &Lattice::new(1, 1.0, 4096).unwrap(), Some(7)).is_err());
    }

    #[test]
    fn constant_goes_to_band_zero() {
        let b = bank();
        let u = GridFunction::constant(b.lattice(), Complex64::new(2.5, 0.0));
        let p = b.decompose(&u).unwrap();
        assert!((p[0].sup_norm() - 2.5).abs() < 1e-12);
        for g in &p[1..] {
            assert!(g.sup_norm() < 1e-12);
        }
    }
}
