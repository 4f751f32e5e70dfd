//! ∂_t u = L^ν u − λu + f, u(0) = 0: exact exponential integration per Fourier mode,
//! with a Feynman–Kac Monte Carlo cross-check.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_positive, domain, Error, Result};
use crate::levy::{IncrementSource, LevyModel};
use crate::lp::{GridFunction, Lattice, TrigPoly};
use crate::math::quad::GaussRule;
use crate::operators::ProbeEstimate;
use crate::rng::stream;
use crate::symbol::SymbolGrid;

/// Forcing sampled on the time nodes, linear in between.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Constant(GridFunction),
    Nodes(Vec<GridFunction>),
}

impl Forcing {
    fn lattice(&self) -> Result<&Lattice> {
        match self {
            Forcing::Constant(f) => Ok(f.lattice()),
            Forcing::Nodes(v) => v.first().map(|f| f.lattice()).ok_or_else(|| Error::Input("empty forcing".into())),
        }
    }

    fn spectra(&self, k: usize) -> Result<Vec<Vec<Complex64>>> {
        match self {
            Forcing::Constant(f) => Ok(vec![f.spectrum()]),
            Forcing::Nodes(v) => {
                if v.len() != k + 1 {
                    return Err(Error::Input(format!("forcing has {} nodes, the time grid has {}", v.len(), k + 1)));
                }
                let l = v[0].lattice();
                if v.iter().any(|f| f.lattice() != l) {
                    return Err(domain("forcing nodes live on different lattices"));
                }
                Ok(v.par_iter().map(|f| f.spectrum()).collect())
            }
        }
    }

    /// f at node k.
    pub fn at(&self, k: usize) -> &GridFunction {
        match self {
            Forcing::Constant(f) => f,
            Forcing::Nodes(v) => &v[k],
        }
    }

    /// f at an arbitrary time of a uniform grid with step `dt`.
    fn eval(&self, s: f64, dt: f64, x: [f64; 2], trig: &[TrigPoly]) -> Complex64 {
        match self {
            Forcing::Constant(_) => trig[0].eval(x),
            Forcing::Nodes(_) => {
                let pos = (s / dt).max(0.0);
                let i = (pos.floor() as usize).min(trig.len() - 2);
                let th = pos - i as f64;
                trig[i].eval(x) * (1.0 - th) + trig[i + 1].eval(x) * th
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
    pub lambda: f64,
    pub model_id: String,
    /// modes whose propagator had to be clamped
    pub clamped: usize,
}

/// φ₁(w) = (e^w − 1)/w and ψ₂(w) = ∫₀¹ e^{wσ}σ dσ = (e^w(w − 1) + 1)/w².
fn weights(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() < 0.5 {
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut p2 = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..20 {
            if k > 0 {
                fact *= k as f64;
            }
            p1 += pw / (fact * (k + 1) as f64);
            p2 += pw / (fact * (k + 2) as f64);
            pw *= w;
        }
        (p1, p2)
    } else {
        let e = w.exp();
        ((e - 1.0) / w, (e * (w - 1.0) + 1.0) / (w * w))
    }
}

struct Stepper {
    prop: Vec<Complex64>,
    w1: Vec<Complex64>,
    w2: Vec<Complex64>,
    clamped: usize,
}

impl Stepper {
    fn new(g: &SymbolGrid, lambda: f64, dt: f64) -> Stepper {
        let mut clamped = 0;
        let mut prop = Vec::with_capacity(g.values().len());
        let mut w1 = Vec::with_capacity(prop.capacity());
        let mut w2 = Vec::with_capacity(prop.capacity());
        for psi in g.values() {
            let w = (psi - lambda) * dt;
            let e = w.exp();
            let (a, b) = weights(w);
            if e.is_finite() && a.is_finite() && b.is_finite() {
                prop.push(e);
                w1.push(a * dt);
                w2.push(b * dt);
            } else {
                clamped += 1;
                prop.push(Complex64::new(0.0, 0.0));
                w1.push(Complex64::new(0.0, 0.0));
                w2.push(Complex64::new(0.0, 0.0));
            }
        }
        Stepper { prop, w1, w2, clamped }
    }

    /// û ← e^{wΔt}û + Δt[φ₁ f̂_{n+1} + ψ₂ (f̂_n − f̂_{n+1})].
    fn step(&self, u: &mut [Complex64], f0: &[Complex64], f1: &[Complex64]) {
        u.par_iter_mut().enumerate().for_each(|(i, v)| {
            *v = self.prop[i] * *v + self.w1[i] * f1[i] + self.w2[i] * (f0[i] - f1[i]);
        });
    }
}

fn check_grid(lambda: f64, t_end: f64, k: usize) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain(format!("λ must be a finite nonnegative number, got {lambda}")));
    }
    check_positive("T", t_end)?;
    if k == 0 {
        return Err(domain("at least one time step is needed"));
    }
    Ok(())
}

/// Exponential-integrator solve from a given initial spectrum.
fn integrate(
    start: Option<&GridFunction>,
    f: &Forcing,
    g: &SymbolGrid,
    lambda: f64,
    t_end: f64,
    k: usize,
) -> Result<SolveResult> {
    check_grid(lambda, t_end, k)?;
    let lattice = f.lattice()?;
    if lattice != g.lattice() {
        return Err(domain("forcing and symbol live on different lattices"));
    }
    let spectra = f.spectra(k)?;
    let dt = t_end / k as f64;
    let stepper = Stepper::new(g, lambda, dt);
    let mut u = match start {
        Some(s) => s.spectrum(),
        None => vec![Complex64::new(0.0, 0.0); lattice.len()],
    };
    let mut times = Vec::with_capacity(k + 1);
    let mut states = Vec::with_capacity(k + 1);
    times.push(0.0);
    states.push(GridFunction::from_spectrum(lattice, &u));
    for n in 0..k {
        let (f0, f1) = if spectra.len() == 1 { (&spectra[0], &spectra[0]) } else { (&spectra[n], &spectra[n + 1]) };
        stepper.step(&mut u, f0, f1);
        times.push(dt * (n + 1) as f64);
        states.push(GridFunction::from_spectrum(lattice, &u));
    }
    Ok(SolveResult { times, states, lambda, model_id: g.model_id().to_string(), clamped: stepper.clamped })
}

/// Mild solution on K uniform steps; exact for forcing linear in time on each step.
pub fn solve_spectral(f: &Forcing, g: &SymbolGrid, lambda: f64, t_end: f64, k: usize) -> Result<SolveResult> {
    integrate(None, f, g, lambda, t_end, k)
}

/// Continues a solve from `state` with time-constant forcing (restart consistency checks).
pub fn continue_from(state: &GridFunction, f: &GridFunction, g: &SymbolGrid, lambda: f64, t_end: f64, k: usize) -> Result<SolveResult> {
    integrate(Some(state), &Forcing::Constant(f.clone()), g, lambda, t_end, k)
}

/// (λ − ψ)^{−1} f̂.
pub fn steady_state(f: &GridFunction, g: &SymbolGrid, lambda: f64) -> Result<GridFunction> {
    if !(lambda > 0.0) {
        return Err(domain("a steady state needs λ > 0"));
    }
    if f.lattice() != g.lattice() {
        return Err(domain("forcing and symbol live on different lattices"));
    }
    let m: Vec<Complex64> = g.values().iter().map(|p| 1.0 / (lambda - p)).collect();
    Ok(f.apply_multiplier(&m))
}

/// Sup-norm of the central-difference residual ∂_t u − (L^ν u − λu + f) at interior nodes.
pub fn residual(result: &SolveResult, f: &Forcing, g: &SymbolGrid) -> Result<Vec<f64>> {
    let k = result.states.len() - 1;
    if k < 4 {
        return Err(domain("residual needs at least four steps"));
    }
    let dt = result.times[1] - result.times[0];
    let lambda = result.lambda;
    let op: Vec<Complex64> = g.values().iter().map(|p| p - lambda).collect();
    (1..k)
        .into_par_iter()
        .map(|n| {
            let dudt = result.states[n + 1].sub(&result.states[n - 1]).scaled(Complex64::new(0.5 / dt, 0.0));
            let rhs = result.states[n].apply_multiplier(&op).add(f.at(n));
            Ok(dudt.sub(&rhs).sup_norm())
        })
        .collect()
}

/// Feynman–Kac estimate u(T, x) = ∫₀^T e^{−λ(T−s)} E f(s, x + Z_{T−s}) ds at probe points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeynmanKacConfig {
    pub paths: usize,
    pub seed: u64,
    pub eps: f64,
    /// uniform panels in s, each with a 4-point Gauss rule
    pub panels: usize,
}

impl Default for FeynmanKacConfig {
    fn default() -> Self {
        FeynmanKacConfig { paths: 100_000, seed: 0, eps: 1e-3, panels: 16 }
    }
}

pub fn solve_mc(
    f: &Forcing,
    model: &LevyModel,
    lambda: f64,
    t_end: f64,
    k: usize,
    probes: &[[f64; 2]],
    cfg: &FeynmanKacConfig,
) -> Result<Vec<ProbeEstimate>> {
    check_grid(lambda, t_end, k)?;
    if cfg.paths < 2 || cfg.panels == 0 {
        return Err(Error::Parameter("Feynman–Kac needs at least two paths and one panel".into()));
    }
    let trig: Vec<TrigPoly> = match f {
        Forcing::Constant(g) => vec![g.to_trig(0.0)],
        Forcing::Nodes(v) => {
            if v.len() != k + 1 {
                return Err(Error::Input("forcing nodes do not match the time grid".into()));
            }
            v.iter().map(|g| g.to_trig(0.0)).collect()
        }
    };
    let source = IncrementSource::for_model(model, cfg.eps)?;
    let dt = t_end / k as f64;
    // r = T − s nodes, ascending, with discounted weights
    let rule = GaussRule::new(4);
    let h = t_end / cfg.panels as f64;
    let mut nodes = Vec::new();
    for p in 0..cfg.panels {
        let mid = h * (p as f64 + 0.5);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let r = mid + 0.5 * h * x;
            nodes.push((r, 0.5 * h * w * (-lambda * r).exp()));
        }
    }
    const CHUNK: usize = 1000;
    let np = probes.len();
    let chunks = cfg.paths.div_ceil(CHUNK);
    let parts: Vec<(Vec<Complex64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![Complex64::new(0.0, 0.0); np];
            let mut sq = vec![0.0; np];
            for p in c * CHUNK..((c + 1) * CHUNK).min(cfg.paths) {
                let mut rng = stream(cfg.seed, p as u64);
                let mut z = [0.0, 0.0];
                let mut prev = 0.0;
                let mut y = vec![Complex64::new(0.0, 0.0); np];
                for &(r, w) in &nodes {
                    let dz = source.sample(r - prev, &mut rng);
                    prev = r;
                    z[0] += dz[0];
                    z[1] += dz[1];
                    for (j, x) in probes.iter().enumerate() {
                        y[j] += w * f.eval(t_end - r, dt, [x[0] + z[0], x[1] + z[1]], &trig);
                    }
                }
                for j in 0..np {
                    sum[j] += y[j];
                    sq[j] += y[j].norm_sqr();
                }
            }
            (sum, sq)
        })
        .collect();
    let n = cfg.paths as f64;
    let mut sum = vec![Complex64::new(0.0, 0.0); np];
    let mut sq = vec![0.0; np];
    for (s, q) in parts {
        sum.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
        sq.iter_mut().zip(&q).for_each(|(a, b)| *a += b);
    }
    Ok(probes
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let mean = sum[j] / n;
            let var = ((sq[j] / n - mean.norm_sqr()) * n / (n - 1.0)).max(0.0);
            ProbeEstimate { x: *x, value: mean, stderr: (var / n).sqrt() }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeFile {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub config_hash: String,
    pub model_id: String,
    pub model_hash: String,
    pub lattice: LatticeSpec,
    pub lambda: f64,
    pub times: Vec<f64>,
    pub nodes: Vec<NodeFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSpec {
    pub d: usize,
    pub box_len: f64,
    pub points: usize,
}

impl From<&Lattice> for LatticeSpec {
    fn from(l: &Lattice) -> Self {
        LatticeSpec { d: l.dim(), box_len: l.box_len(), points: l.points() }
    }
}

impl SolveResult {
    /// Writes node_XXXXX.bin per time node and manifest.json into `dir`.
    pub fn export(&self, dir: &Path, config_hash: &str) -> Result<Manifest> {
        std::fs::create_dir_all(dir)?;
        let mut nodes = Vec::with_capacity(self.states.len());
        for (i, s) in self.states.iter().enumerate() {
            let name = format!("node_{i:05}.bin");
            let bytes = s.to_bytes();
            crate::io::write_atomic(&dir.join(&name), &bytes)?;
            nodes.push(NodeFile { name, sha256: crate::io::sha256_hex(&bytes) });
        }
        let manifest = Manifest {
            config_hash: config_hash.to_string(),
            model_id: self.model_id.clone(),
            model_hash: crate::io::sha256_hex(self.model_id.as_bytes()),
            lattice: LatticeSpec::from(self.states[0].lattice()),
            lambda: self.lambda,
            times: self.times.clone(),
            nodes,
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Input(e.to_string()))?;
        crate::io::write_atomic(&dir.join("manifest.json"), json.as_bytes())?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::Angular;
    use crate::operators::{apply_generator, probe_points};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn setup() -> (Lattice, LevyModel, SymbolGrid) {
        let l = Lattice::new(1, 1.0, 64).unwrap();
        let m = LevyModel::stable(1, 1.5, Angular::Line { plus: 1.0, minus: 0.5 }).unwrap();
        let g = SymbolGrid::compute(&m, &l).unwrap();
        (l, m, g)
    }

    fn mode_solution(psi: Complex64, lambda: f64, t: f64) -> Complex64 {
        let z = psi - lambda;
        (1.0 - (z * t).exp()) / (-z)
    }

    #[test]
    fn single_mode_duhamel() {
        let (l, _, g) = setup();
        let k = [3i64, 0];
        let f = GridFunction::mode(&l, k, c(1.0));
        let psi = g.values()[l.mode_index(k).unwrap()];
        let r = solve_spectral(&Forcing::Constant(f.clone()), &g, 0.7, 1.0, 256).unwrap();
        for (t, s) in r.times.iter().zip(&r.states) {
            let want = f.scaled(mode_solution(psi, 0.7, *t));
            assert!(s.sub(&want).sup_norm() <= 1e-12, "t={t}");
        }
        assert_eq!(r.states[0].sup_norm(), 0.0);
    }

    #[test]
    fn homogeneous_problem_stays_zero() {
        let (l, _, g) = setup();
        let r = solve_spectral(&Forcing::Constant(GridFunction::zeros(&l)), &g, 0.0, 1.0, 16).unwrap();
        assert!(r.states.iter().all(|s| s.sup_norm() == 0.0));
        let res = residual(&r, &Forcing::Constant(GridFunction::zeros(&l)), &g).unwrap();
        assert!(res.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn residual_is_second_order() {
        let (l, _, g) = setup();
        let f = Forcing::Constant(GridFunction::mode(&l, [1, 0], c(1.0)).add(&GridFunction::mode(&l, [-1, 0], c(1.0))));
        let r1 = residual(&solve_spectral(&f, &g, 1.0, 1.0, 128).unwrap(), &f, &g).unwrap();
        let r2 = residual(&solve_spectral(&f, &g, 1.0, 1.0, 256).unwrap(), &f, &g).unwrap();
        let m1 = r1.iter().fold(0f64, |a, b| a.max(*b));
        let m2 = r2.iter().fold(0f64, |a, b| a.max(*b));
        let ratio = m1 / m2;
        assert!((ratio - 4.0).abs() <= 1.2, "ratio {ratio}");
    }

    #[test]
    fn time_dependent_forcing_is_second_order() {
        // f(t) = t·e^{i2πx} has û(t) = [t/(−z) − (1 − e^{zt})/z²]
        let (l, _, g) = setup();
        let k = [1i64, 0];
        let psi = g.values()[l.mode_index(k).unwrap()];
        let z = psi - 0.5;
        let exact = |t: f64| t / (-z) - (1.0 - (z * t).exp()) / (z * z);
        let mode = GridFunction::mode(&l, k, c(1.0));
        for steps in [8usize, 64] {
            let nodes = (0..=steps).map(|n| mode.scaled(c(n as f64 / steps as f64))).collect();
            let r = solve_spectral(&Forcing::Nodes(nodes), &g, 0.5, 1.0, steps).unwrap();
            let err = r.states[steps].sub(&mode.scaled(exact(1.0))).sup_norm();
            assert!(err < 1e-12, "{steps}: {err}");
        }
    }

    #[test]
    fn long_time_limit_is_steady_state() {
        let (l, _, g) = setup();
        let f = GridFunction::mode(&l, [2, 0], c(1.0)).add(&GridFunction::constant(&l, c(0.5)));
        let r = solve_spectral(&Forcing::Constant(f.clone()), &g, 1.0, 20.0, 200).unwrap();
        let ss = steady_state(&f, &g, 1.0).unwrap();
        assert!(r.states.last().unwrap().sub(&ss).sup_norm() <= 1e-6);
        // (λI − L) steady_state(f) = f
        let back = ss.scaled(c(1.0)).sub(&apply_generator(&ss, &g).unwrap());
        assert!(back.sub(&f).sup_norm() <= 1e-10);
        assert!(steady_state(&f, &g, 0.0).is_err());
    }

    #[test]
    fn restart_consistency() {
        let (l, _, g) = setup();
        let f = GridFunction::mode(&l, [1, 0], c(0.4)).add(&GridFunction::mode(&l, [5, 0], Complex64::new(0.1, 0.2)));
        let whole = solve_spectral(&Forcing::Constant(f.clone()), &g, 0.3, 1.0, 64).unwrap();
        let half = solve_spectral(&Forcing::Constant(f.clone()), &g, 0.3, 0.5, 32).unwrap();
        let rest = continue_from(half.states.last().unwrap(), &f, &g, 0.3, 0.5, 32).unwrap();
        assert!(whole.states[64].sub(&rest.states[32]).sup_norm() <= 1e-10);
    }

    #[test]
    fn positivity_for_symmetric_models() {
        let l = Lattice::new(1, 1.0, 128).unwrap();
        let m = LevyModel::stable(1, 1.2, Angular::uniform(1)).unwrap();
        let g = SymbolGrid::compute(&m, &l).unwrap();
        let f = TrigPoly::new(1, 1.0, vec![([0, 0], c(1.0)), ([1, 0], c(0.5)), ([-1, 0], c(0.5))]).to_grid(&l);
        let r = solve_spectral(&Forcing::Constant(f), &g, 0.0, 1.0, 32).unwrap();
        assert!(r.states.iter().all(|s| s.values().iter().all(|v| v.re >= -1e-8)));
    }

    #[test]
    fn feynman_kac_agrees() {
        let (l, m, g) = setup();
        let f = TrigPoly::new(1, 1.0, vec![([0, 0], c(0.2)), ([1, 0], c(0.5)), ([-1, 0], c(0.5))]).to_grid(&l);
        let forcing = Forcing::Constant(f);
        let r = solve_spectral(&forcing, &g, 1.0, 1.0, 16).unwrap();
        let probes = probe_points(&l, 8);
        let cfg = FeynmanKacConfig { paths: 10_000, seed: 3, ..Default::default() };
        let est = solve_mc(&forcing, &m, 1.0, 1.0, 16, &probes, &cfg).unwrap();
        for p in &est {
            let want = r.states[16].eval(p.x);
            assert!((p.value - want).norm() <= 4.0 * p.stderr + 1e-4, "{p:?} vs {want}");
        }
        // constant forcing is exact in expectation: c(1 − e^{−λT})/λ
        let one = Forcing::Constant(GridFunction::constant(&l, c(2.0)));
        let est = solve_mc(&one, &m, 1.0, 1.0, 16, &probes[..2], &FeynmanKacConfig { paths: 50, ..cfg }).unwrap();
        assert!((est[0].value.re - 2.0 * (1.0 - (-1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn export_is_deterministic() {
        let (l, _, g) = setup();
        let f = Forcing::Constant(GridFunction::mode(&l, [1, 0], c(1.0)));
        let r = solve_spectral(&f, &g, 1.0, 1.0, 4).unwrap();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let a = r.export(d1.path(), "abc").unwrap();
        let b = r.export(d2.path(), "abc").unwrap();
        assert_eq!(a, b);
        assert_eq!(std::fs::read(d1.path().join("manifest.json")).unwrap(), std::fs::read(d2.path().join("manifest.json")).unwrap());
        let back = GridFunction::load(&d1.path().join("node_00004.bin")).unwrap();
        assert_eq!(back, r.states[4]);
    }
}
