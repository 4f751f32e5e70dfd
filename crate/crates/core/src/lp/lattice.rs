//! Periodic box lattice x_n = −Λ/2 + nΛ/M with its discrete Fourier transform.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Result};

#[derive(Clone)]
pub struct Lattice {
    dim: usize,
    box_len: f64,
    points: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("dim", &self.dim)
            .field("box_len", &self.box_len)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim && self.box_len == o.box_len && self.points == o.points
    }
}

impl Lattice {
    pub fn new(dim: usize, box_len: f64, points: usize) -> Result<Lattice> {
        if dim != 1 && dim != 2 {
            return Err(domain(format!("lattice dimension must be 1 or 2, got {dim}")));
        }
        if !(box_len.is_finite() && box_len > 0.0) {
            return Err(domain(format!("box length must be positive, got {box_len}")));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(domain(format!("points per dimension must be a power of two ≥ 4, got {points}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Lattice {
            dim,
            box_len,
            points,
            fwd: planner.plan_fft_forward(points),
            inv: planner.plan_fft_inverse(points),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn box_len(&self) -> f64 {
        self.box_len
    }
    pub fn points(&self) -> usize {
        self.points
    }
    /// Total number of nodes M^d.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn spacing(&self) -> f64 {
        self.box_len / self.points as f64
    }
    /// Largest representable frequency M/(2Λ).
    pub fn nyquist(&self) -> f64 {
        self.points as f64 / (2.0 * self.box_len)
    }

    /// Integer mode of a one-dimensional index in FFT order.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.points / 2 {
            i as i64
        } else {
            i as i64 - self.points as i64
        }
    }

    /// Integer modes of a flat index (x index varies fastest).
    #[inline]
    pub fn modes(&self, n: usize) -> [i64; 2] {
        if self.dim == 1 {
            [self.mode(n), 0]
        } else {
            [self.mode(n % self.points), self.mode(n / self.points)]
        }
    }

    #[inline]
    pub fn frequency(&self, n: usize) -> [f64; 2] {
        let k = self.modes(n);
        [k[0] as f64 / self.box_len, k[1] as f64 / self.box_len]
    }

    #[inline]
    pub fn frequency_norm(&self, n: usize) -> f64 {
        let f = self.frequency(n);
        f[0].hypot(f[1])
    }

    #[inline]
    pub fn coordinate(&self, n: usize) -> [f64; 2] {
        let h = self.spacing();
        let x0 = -0.5 * self.box_len;
        if self.dim == 1 {
            [x0 + h * n as f64, 0.0]
        } else {
            [x0 + h * (n % self.points) as f64, x0 + h * (n / self.points) as f64]
        }
    }

    /// Flat index of an integer mode, if it is on the lattice (Nyquist excluded).
    pub fn mode_index(&self, k: [i64; 2]) -> Option<usize> {
        let half = (self.points / 2) as i64;
        let wrap = |m: i64| -> Option<usize> {
            if m.abs() >= half {
                None
            } else if m >= 0 {
                Some(m as usize)
            } else {
                Some((m + self.points as i64) as usize)
            }
        };
        if self.dim == 1 {
            if k[1] != 0 {
                return None;
            }
            wrap(k[0])
        } else {
            Some(wrap(k[0])? + self.points * wrap(k[1])?)
        }
    }

    /// Flat index of a lattice shift by whole cells (periodic).
    pub fn shift_index(&self, n: usize, s: [i64; 2]) -> usize {
        let m = self.points as i64;
        if self.dim == 1 {
            (n as i64 + s[0]).rem_euclid(m) as usize
        } else {
            let (i, j) = ((n % self.points) as i64, (n / self.points) as i64);
            ((i + s[0]).rem_euclid(m) + m * (j + s[1]).rem_euclid(m)) as usize
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let m = self.points;
        if self.dim == 1 {
            plan.process(data);
            return;
        }
        data.par_chunks_mut(m).for_each(|row| plan.process(row));
        let mut t = vec![Complex64::new(0.0, 0.0); m * m];
        transpose(data, &mut t, m);
        t.par_chunks_mut(m).for_each(|row| plan.process(row));
        transpose(&t, data, m);
    }

    /// Fourier coefficients c_k with u_n = Σ_k c_k e^{i2πk·n/M}.
    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len());
        let mut d = values.to_vec();
        self.transform(&mut d, &self.fwd);
        let s = 1.0 / self.len() as f64;
        d.iter_mut().for_each(|v| *v *= s);
        d
    }

    /// Samples from Fourier coefficients.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.len());
        let mut d = coeffs.to_vec();
        self.transform(&mut d, &self.inv);
        d
    }

    /// Largest band index j with N^{j+1} ≤ Nyquist.
    pub fn max_band(&self, base: f64) -> Option<usize> {
        let ny = self.nyquist();
        let mut j = 0usize;
        while base.powi(j as i32 + 2) <= ny * (1.0 + 1e-12) {
            j += 1;
        }
        (base.powi(j as i32 + 1) <= ny * (1.0 + 1e-12)).then_some(j)
    }

    /// Same box and dimension, twice the points per dimension.
    pub fn refined(&self) -> Result<Lattice> {
        Lattice::new(self.dim, self.box_len, 2 * self.points)
    }

    pub fn describe(&self) -> String {
        format!("d={};L={};M={}", self.dim, self.box_len, self.points)
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    const B: usize = 32;
    for bi in (0..m).step_by(B) {
        for bj in (0..m).step_by(B) {
            for i in bi..(bi + B).min(m) {
                for j in bj..(bj + B).min(m) {
                    dst[j * m + i] = src[i * m + j];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Lattice::new(3, 1.0, 64).is_err());
        assert!(Lattice::new(1, 0.0, 64).is_err());
        assert!(Lattice::new(1, 1.0, 100).is_err());
    }

    #[test]
    fn round_trip_two_dimensional() {
        let l = Lattice::new(2, 3.0, 16).unwrap();
        let v: Vec<Complex64> = (0..l.len()).map(|n| Complex64::new((n as f64).sin(), (n as f64 * 0.3).cos())).collect();
        let back = l.inverse(&l.forward(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_mode_has_one_coefficient() {
        let l = Lattice::new(2, 2.0, 16).unwrap();
        let k = [3i64, -2];
        let v: Vec<Complex64> = (0..l.len())
            .map(|n| {
                let x = l.coordinate(n);
                let f = [k[0] as f64 / 2.0, k[1] as f64 / 2.0];
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (f[0] * x[0] + f[1] * x[1]))
            })
            .collect();
        let c = l.forward(&v);
        let idx = l.mode_index(k).unwrap();
        assert_eq!(l.modes(idx), k);
        // the box origin contributes the phase e^{i2πξ·x0}
        assert!((c[idx].norm() - 1.0).abs() < 1e-12);
        let rest: f64 = c.iter().enumerate().filter(|(n, _)| *n != idx).map(|(_, v)| v.norm()).sum();
        assert!(rest < 1e-10);
    }

    #[test]
    fn band_count() {
        let l = Lattice::new(1, 1.0, 4096).unwrap();
        assert_eq!(l.max_band(4.0), Some(4));
        let coarse = Lattice::new(1, 64.0, 4096).unwrap();
        assert_eq!(coarse.max_band(4.0), Some(1));
        assert_eq!(Lattice::new(1, 64.0, 256).unwrap().max_band(4.0), None);
    }

    #[test]
    fn shifts_wrap() {
        let l = Lattice::new(2, 1.0, 8).unwrap();
        assert_eq!(l.shift_index(0, [-1, -1]), 63);
        assert_eq!(l.shift_index(7, [1, 0]), 0);
    }
}
