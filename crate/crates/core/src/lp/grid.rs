//! Complex samples of a periodic function on a lattice, and sparse trigonometric polynomials.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(lattice: &Lattice, values: Vec<Complex64>) -> Result<GridFunction> {
        if values.len() != lattice.len() {
            return Err(Error::Input(format!("expected {} samples, got {}", lattice.len(), values.len())));
        }
        Ok(GridFunction { lattice: lattice.clone(), values })
    }

    pub fn zeros(lattice: &Lattice) -> GridFunction {
        Self::constant(lattice, Complex64::new(0.0, 0.0))
    }

    pub fn constant(lattice: &Lattice, c: Complex64) -> GridFunction {
        GridFunction { lattice: lattice.clone(), values: vec![c; lattice.len()] }
    }

    pub fn from_fn(lattice: &Lattice, f: impl Fn([f64; 2]) -> Complex64) -> GridFunction {
        let values = (0..lattice.len()).map(|n| f(lattice.coordinate(n))).collect();
        GridFunction { lattice: lattice.clone(), values }
    }

    /// amp·e^{i2π k·x/Λ}.
    pub fn mode(lattice: &Lattice, k: [i64; 2], amp: Complex64) -> GridFunction {
        TrigPoly::new(lattice.dim(), lattice.box_len(), vec![(k, amp)]).to_grid(lattice)
    }

    pub fn from_spectrum(lattice: &Lattice, coeffs: &[Complex64]) -> GridFunction {
        GridFunction { lattice: lattice.clone(), values: lattice.inverse(coeffs) }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        self.lattice.forward(&self.values)
    }

    /// |u|₀ on the lattice.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Σ|u(x_n)| h^d.
    pub fn l1_norm(&self) -> f64 {
        let h = self.lattice.spacing().powi(self.lattice.dim() as i32);
        crate::math::stats::pairwise_sum(&self.values.iter().map(|v| v.norm()).collect::<Vec<_>>()) * h
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Multiplies the spectrum pointwise.
    pub fn apply_multiplier(&self, m: &[Complex64]) -> GridFunction {
        let mut c = self.spectrum();
        c.iter_mut().zip(m).for_each(|(a, b)| *a *= b);
        Self::from_spectrum(&self.lattice, &c)
    }

    pub fn apply_real_multiplier(&self, m: &[f64]) -> GridFunction {
        let mut c = self.spectrum();
        c.iter_mut().zip(m).for_each(|(a, b)| *a *= b);
        Self::from_spectrum(&self.lattice, &c)
    }

    pub fn scaled(&self, s: Complex64) -> GridFunction {
        GridFunction { lattice: self.lattice.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, o: &GridFunction) -> GridFunction {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &GridFunction) -> GridFunction {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &GridFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> GridFunction {
        assert_eq!(self.lattice, o.lattice, "grid functions live on different lattices");
        GridFunction {
            lattice: self.lattice.clone(),
            values: self.values.iter().zip(&o.values).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// Trigonometric polynomial through the samples (Nyquist row dropped), keeping |c| > tol.
    pub fn to_trig(&self, tol: f64) -> TrigPoly {
        let c = self.spectrum();
        let l = &self.lattice;
        let x0 = -0.5 * l.box_len();
        let half = (l.points() / 2) as i64;
        let mut modes = Vec::new();
        for (n, v) in c.iter().enumerate() {
            let k = l.modes(n);
            if v.norm() <= tol || k[0] == -half || k[1] == -half {
                continue;
            }
            let ph = -2.0 * PI * (k[0] + k[1]) as f64 * x0 / l.box_len();
            modes.push((k, v * Complex64::from_polar(1.0, ph)));
        }
        TrigPoly::new(l.dim(), l.box_len(), modes)
    }

    /// Spectral interpolation at an arbitrary point.
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        self.to_trig(0.0).eval(x)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.values.len() * 48);
        s.push_str(if self.lattice.dim() == 1 { "x,re,im\n" } else { "x,y,re,im\n" });
        for (n, v) in self.values.iter().enumerate() {
            let x = self.lattice.coordinate(n);
            if self.lattice.dim() == 1 {
                s.push_str(&format!("{:e},{:e},{:e}\n", x[0], v.re, v.im));
            } else {
                s.push_str(&format!("{:e},{:e},{:e},{:e}\n", x[0], x[1], v.re, v.im));
            }
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<GridFunction> {
        let rows = io::parse_numeric_csv(text)?;
        let cols = rows.first().map(|r| r.len()).ok_or_else(|| Error::Parse("empty grid CSV".into()))?;
        let dim = match cols {
            3 => 1,
            4 => 2,
            c => return Err(Error::Parse(format!("grid CSV needs 3 or 4 columns, found {c}"))),
        };
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged grid CSV".into()));
        }
        let m = if dim == 1 { rows.len() } else { (rows.len() as f64).sqrt().round() as usize };
        if m < 2 || m.pow(dim as u32) != rows.len() {
            return Err(Error::Parse(format!("{} rows do not form a square lattice", rows.len())));
        }
        let h = rows[1][0] - rows[0][0];
        let lattice = Lattice::new(dim, h * m as f64, m)?;
        let values = rows.iter().map(|r| Complex64::new(r[cols - 2], r[cols - 1])).collect();
        GridFunction::new(&lattice, values)
    }

    /// Header (u64 d, f64 Λ, u64 M) then little-endian (re, im) pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(24 + 16 * self.values.len());
        b.extend_from_slice(&(self.lattice.dim() as u64).to_le_bytes());
        b.extend_from_slice(&self.lattice.box_len().to_le_bytes());
        b.extend_from_slice(&(self.lattice.points() as u64).to_le_bytes());
        for v in &self.values {
            b.extend_from_slice(&v.re.to_le_bytes());
            b.extend_from_slice(&v.im.to_le_bytes());
        }
        b
    }

    pub fn from_bytes(b: &[u8]) -> Result<GridFunction> {
        let word = |i: usize| -> Result<[u8; 8]> {
            b.get(8 * i..8 * i + 8)
                .map(|s| s.try_into().unwrap())
                .ok_or_else(|| Error::Parse("truncated grid file".into()))
        };
        let dim = u64::from_le_bytes(word(0)?) as usize;
        let box_len = f64::from_le_bytes(word(1)?);
        let points = u64::from_le_bytes(word(2)?) as usize;
        let lattice = Lattice::new(dim, box_len, points)?;
        if b.len() != 24 + 16 * lattice.len() {
            return Err(Error::Parse(format!("grid file has {} bytes, expected {}", b.len(), 24 + 16 * lattice.len())));
        }
        let values = (0..lattice.len())
            .map(|n| -> Result<Complex64> {
                Ok(Complex64::new(f64::from_le_bytes(word(3 + 2 * n)?), f64::from_le_bytes(word(4 + 2 * n)?)))
            })
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(&lattice, values)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = if path.extension().is_some_and(|e| e == "csv") {
            self.to_csv().into_bytes()
        } else {
            self.to_bytes()
        };
        io::write_atomic(path, &bytes)
    }

    /// Loads by extension: `.csv` as text, anything else as the binary block.
    pub fn load(path: &Path) -> Result<GridFunction> {
        if path.extension().is_some_and(|e| e == "csv") {
            Self::from_csv(&std::fs::read_to_string(path)?)
        } else {
            Self::from_bytes(&std::fs::read(path)?)
        }
    }
}

/// Σ c_k e^{i2π k·x/Λ} over a sparse set of integer modes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    box_len: f64,
    modes: Vec<([i64; 2], Complex64)>,
}

impl TrigPoly {
    pub fn new(dim: usize, box_len: f64, modes: Vec<([i64; 2], Complex64)>) -> TrigPoly {
        TrigPoly { dim, box_len, modes }
    }

    pub fn modes(&self) -> &[([i64; 2], Complex64)] {
        &self.modes
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    /// Physical frequency of the k-th stored mode.
    pub fn frequency(&self, i: usize) -> [f64; 2] {
        let k = self.modes[i].0;
        [k[0] as f64 / self.box_len, k[1] as f64 / self.box_len]
    }

    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        let s = 2.0 * PI / self.box_len;
        self.modes
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, s * (k[0] as f64 * x[0] + k[1] as f64 * x[1])))
            .sum()
    }

    pub fn to_grid(&self, lattice: &Lattice) -> GridFunction {
        let mut c = vec![Complex64::new(0.0, 0.0); lattice.len()];
        let x0 = -0.5 * lattice.box_len();
        let ratio = lattice.box_len() / self.box_len;
        for (k, v) in &self.modes {
            let lk = [(k[0] as f64 * ratio).round() as i64, (k[1] as f64 * ratio).round() as i64];
            if let Some(n) = lattice.mode_index(lk) {
                let ph = 2.0 * PI * (lk[0] + lk[1]) as f64 * x0 / lattice.box_len();
                c[n] += v * Complex64::from_polar(1.0, ph);
            }
        }
        GridFunction::from_spectrum(lattice, &c)
    }

    pub fn scaled(&self, s: Complex64) -> TrigPoly {
        TrigPoly { dim: self.dim, box_len: self.box_len, modes: self.modes.iter().map(|(k, c)| (*k, c * s)).collect() }
    }
}
