//! Rescaled band kernels H_t^{j,κ} = ℱ^{−1}[e^{ψ^{ν̃}t} m_κ(ψ^{μ̃}) ℱφ̃] and their L¹ behaviour in time.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::levy::LevyModel;
use crate::lp::bank::eta;
use crate::lp::Lattice;
use crate::math::stats::{linear_fit, LineFit};
use crate::scaling::ScalingFunction;
use crate::symbol::{symbol, SymbolGrid};

/// ℱφ̃ at |ξ| = s: the three annuli around scale one, supported on N^{−2} ≤ s ≤ N².
pub fn unit_companion(base: f64, s: f64) -> f64 {
    eta(base, s / base) - eta(base, s * base * base)
}

/// Spectral data of H^{j,κ} on a lattice; evaluating at t costs one inverse transform.
#[derive(Debug, Clone)]
pub struct BandKernel {
    lattice: Lattice,
    psi_nu: Vec<Complex64>,
    weight: Vec<Complex64>,
    pub j: usize,
    pub kappa: f64,
}

impl BandKernel {
    pub fn new(
        nu: &LevyModel,
        mu: &LevyModel,
        sf: &ScalingFunction,
        base: f64,
        j: usize,
        kappa: f64,
        lattice: &Lattice,
    ) -> Result<BandKernel> {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(domain(format!("kernel order must lie in [0,1], got {kappa}")));
        }
        if j == 0 {
            return Err(domain("rescaled kernels start at j = 1"));
        }
        let top = base * base;
        if lattice.nyquist() < top || 1.0 / lattice.box_len() > 1.0 / top {
            return Err(crate::error::config(
                "kernel lattice",
                format!("lattice must resolve N^−2 ≤ |ξ| ≤ N², got {}", lattice.describe()),
            ));
        }
        let r = base.powi(-(j as i32));
        let wr = sf.w(r)?;
        let nu_j = nu.rescaled(r, wr);
        let mu_j = mu.rescaled(r, wr);
        let n = lattice.len();
        let support: Vec<usize> =
            (0..n).filter(|&i| unit_companion(base, lattice.frequency_norm(i)) > 0.0).collect();
        let mut psi_nu = vec![Complex64::new(0.0, 0.0); n];
        let mut weight = vec![Complex64::new(0.0, 0.0); n];
        let vals: Vec<(usize, Complex64, Complex64)> = support
            .par_iter()
            .map(|&i| {
                let xi = lattice.frequency(i);
                let pn = symbol(&nu_j, xi)?;
                let pm = symbol(&mu_j, xi)?;
                let m = if kappa == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else if kappa == 1.0 {
                    pm
                } else {
                    Complex64::new(-(-pm.re).max(0.0).powf(kappa), 0.0)
                };
                Ok((i, pn, m * unit_companion(base, lattice.frequency_norm(i))))
            })
            .collect::<Result<_>>()?;
        for (i, p, w) in vals {
            psi_nu[i] = p;
            weight[i] = w;
        }
        Ok(BandKernel { lattice: lattice.clone(), psi_nu, weight, j, kappa })
    }

    /// Same kernel, reusing already computed symbol grids on the kernel lattice.
    pub fn from_grids(g_nu: &SymbolGrid, g_mu: &SymbolGrid, base: f64, j: usize, kappa: f64) -> BandKernel {
        let l = g_nu.lattice();
        let mut weight = vec![Complex64::new(0.0, 0.0); l.len()];
        for (i, w) in weight.iter_mut().enumerate() {
            let pm = g_mu.values()[i];
            let m = if kappa == 0.0 {
                Complex64::new(1.0, 0.0)
            } else if kappa == 1.0 {
                pm
            } else {
                Complex64::new(-(-pm.re).max(0.0).powf(kappa), 0.0)
            };
            *w = m * unit_companion(base, l.frequency_norm(i));
        }
        BandKernel { lattice: l.clone(), psi_nu: g_nu.values().to_vec(), weight, j, kappa }
    }

    fn spectrum(&self, t: f64) -> Vec<Complex64> {
        self.psi_nu.iter().zip(&self.weight).map(|(p, w)| if w.norm() == 0.0 { *w } else { (p * t).exp() * w }).collect()
    }

    fn l1_of(&self, spec: &[Complex64]) -> f64 {
        let k = self.lattice.inverse(spec);
        k.iter().map(|v| v.norm()).sum::<f64>() / self.lattice.len() as f64
    }

    /// ∫|H_t(x)| dx on the lattice.
    pub fn l1(&self, t: f64) -> f64 {
        self.l1_of(&self.spectrum(t))
    }

    /// ∫|H_t(x) − H_s(x)| dx.
    pub fn l1_difference(&self, t: f64, s: f64) -> f64 {
        let a = self.spectrum(t);
        let b = self.spectrum(s);
        let d: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        self.l1_of(&d)
    }
}

/// Fit window t ∈ [1, 8]: below t ≈ 1 the high-frequency part of the annulus is still decaying
/// faster than the bulk, which bends the log curve without affecting the bound.
pub fn default_fit_times() -> Vec<f64> {
    (2..=16).map(|i| 0.5 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelDecay {
    pub j: usize,
    pub kappa: f64,
    pub times: Vec<f64>,
    pub l1: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub r2: f64,
}

/// Fits ∫|H_t| ≈ C₁e^{−C₂t} by least squares on log values.
pub fn kernel_l1_decay(kernel: &BandKernel, times: &[f64]) -> Result<KernelDecay> {
    let l1: Vec<f64> = times.par_iter().map(|&t| kernel.l1(t)).collect();
    let y: Vec<f64> = l1.iter().map(|v| v.ln()).collect();
    let fit = linear_fit(times, &y).unwrap_or(LineFit { slope: f64::NAN, intercept: f64::NAN, r2: 0.0 });
    Ok(KernelDecay { j: kernel.j, kappa: kernel.kappa, times: times.to_vec(), l1, c1: fit.intercept.exp(), c2: -fit.slope, r2: fit.r2 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelLipschitz {
    /// sup over pairs of ∫|H_t − H_s| / (e^{−C₂s}(t − s))
    pub constant: f64,
    /// fitted exponent of ∫|H_{s+g} − H_s| in the gap g at the first s
    pub gap_exponent: f64,
    /// fitted decay rate in s at the smallest gap
    pub s_rate: f64,
}

pub fn kernel_time_lipschitz(kernel: &BandKernel, c2: f64, starts: &[f64], gaps: &[f64]) -> Result<KernelLipschitz> {
    if starts.is_empty() || gaps.len() < 2 {
        return Err(domain("need at least one start and two gaps"));
    }
    let table: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&s| gaps.iter().map(|&g| kernel.l1_difference(s + g, s)).collect())
        .collect();
    let mut constant = 0f64;
    for (s, row) in starts.iter().zip(&table) {
        for (g, v) in gaps.iter().zip(row) {
            constant = constant.max(v / ((-c2 * s).exp() * g));
        }
    }
    let lx: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let ly: Vec<f64> = table[0].iter().map(|v| v.ln()).collect();
    let gap_exponent = linear_fit(&lx, &ly).map(|f| f.slope).unwrap_or(f64::NAN);
    let s_rate = if starts.len() >= 2 {
        let col: Vec<f64> = table.iter().map(|r| r[0].ln()).collect();
        linear_fit(starts, &col).map(|f| -f.slope).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    Ok(KernelLipschitz { constant, gap_exponent, s_rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{Angular, BernsteinPhi};

    fn kl() -> Lattice {
        Lattice::new(1, 64.0, 4096).unwrap()
    }

    #[test]
    fn zero_time_is_the_bank_constant() {
        let nu = LevyModel::stable(1, 1.5, Angular::uniform(1)).unwrap();
        let sf = ScalingFunction::power(1.5).unwrap();
        let k = BandKernel::new(&nu, &nu, &sf, 4.0, 1, 0.0, &kl()).unwrap();
        let l = kl();
        let spec: Vec<Complex64> = (0..l.len()).map(|i| Complex64::new(unit_companion(4.0, l.frequency_norm(i)), 0.0)).collect();
        let direct = l.inverse(&spec).iter().map(|v| v.norm()).sum::<f64>() / l.len() as f64;
        assert!((k.l1(0.0) - direct).abs() < 1e-14);
        assert_eq!(k.l1_difference(0.3, 0.3), 0.0);
    }

    #[test]
    fn stable_kernels_are_scale_free_and_decay() {
        let nu = LevyModel::stable(1, 1.5, Angular::Line { plus: 1.0, minus: 0.5 }).unwrap();
        let mu = nu.symmetrize();
        let sf = ScalingFunction::power(1.5).unwrap();
        let times = default_fit_times();
        for kappa in [0.0, 0.5, 1.0] {
            let d: Vec<KernelDecay> = (1..=3)
                .map(|j| kernel_l1_decay(&BandKernel::new(&nu, &mu, &sf, 4.0, j, kappa, &kl()).unwrap(), &times).unwrap())
                .collect();
            for x in &d[1..] {
                for (a, b) in x.l1.iter().zip(&d[0].l1) {
                    assert!((a - b).abs() <= 1e-6 * b, "κ={kappa}");
                }
            }
            assert!(d[0].r2 >= 0.98 && d[0].c2 > 0.0, "κ={kappa}: {:?}", d[0]);
        }
    }

    #[test]
    fn subordinated_kernels_decay_uniformly() {
        let phi = BernsteinPhi::new(2, vec![0.5, 0.4]).unwrap();
        let nu = LevyModel::bernstein(1, phi, Angular::uniform(1)).unwrap();
        let sf = ScalingFunction::induced(&nu).unwrap();
        let times = default_fit_times();
        for j in 1..=3 {
            for kappa in [0.0, 0.5, 1.0] {
                let k = BandKernel::new(&nu, &nu, &sf, 4.0, j, kappa, &kl()).unwrap();
                let d = kernel_l1_decay(&k, &times).unwrap();
                assert!(d.r2 >= 0.98 && d.c2 > 0.0, "j={j} κ={kappa}: {} {}", d.r2, d.c2);
                let lip = kernel_time_lipschitz(&k, d.c2, &[0.5, 1.0, 2.0], &[0.01, 0.02, 0.04, 0.08]).unwrap();
                assert!((lip.gap_exponent - 1.0).abs() <= 0.1, "{lip:?}");
                assert!(lip.s_rate > 0.0 && lip.constant.is_finite());
            }
        }
    }

    #[test]
    fn coarse_lattices_are_rejected() {
        let nu = LevyModel::stable(1, 1.5, Angular::uniform(1)).unwrap();
        let sf = ScalingFunction::power(1.5).unwrap();
        let l = Lattice::new(1, 1.0, 64).unwrap();
        assert!(BandKernel::new(&nu, &nu, &sf, 4.0, 1, 0.5, &l).is_err());
        assert!(BandKernel::new(&nu, &nu, &sf, 4.0, 0, 0.5, &kl()).is_err());
    }
}
