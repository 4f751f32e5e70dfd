//! Run configuration: TOML sections with explicit defaults and a normalized, hashable form.
//!
//! Grammar (all sections and keys optional; missing keys take the defaults shown by
//! `levyspace config`-style normalization, i.e. `RunConfig::default().to_toml()`):
//!
//! ```toml
//! [lattice]            # function lattice
//! dim = 1
//! box_len = 1.0
//! points = 4096
//!
//! [kernel_lattice]     # lattice for rescaled band kernels
//! box_len = 64.0
//! points = 4096
//!
//! [bank]
//! base = 4.0
//! j_max = 0            # 0 selects the largest admissible band
//!
//! [model]              # operator measure ν
//! kind = "stable"      # or "bernstein" (phi = { kind, params }) or "table" (radial_csv, order)
//! alpha = 1.5
//! angular = "uniform"  # or a weight list: [plus, minus] in 1-d, circle nodes in 2-d
//!
//! [reference]          # reference measure μ; defaults to the symmetric stable of matching order
//! [scaling]            # kind = "power" (alpha) | "bernstein" (phi) | "table" (path) | "induced"
//! [solver]             # lambda, t_end, steps
//! [mc]                 # seed, paths, eps, probes
//! [verify]             # beta, kappas, family_size, family_seed, spread_bound, kernel_bands, checks
//! [output]             # dir
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::io::sha256_hex;
use crate::levy::{Angular, BernsteinPhi, LevyModel};
use crate::lp::Lattice;
use crate::operators::McConfig;
use crate::scaling::ScalingFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    pub dim: usize,
    pub box_len: f64,
    pub points: usize,
}

impl Default for LatticeSection {
    fn default() -> Self {
        LatticeSection { dim: 1, box_len: 1.0, points: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelLatticeSection {
    pub box_len: f64,
    pub points: usize,
}

impl Default for KernelLatticeSection {
    fn default() -> Self {
        KernelLatticeSection { box_len: 64.0, points: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BankSection {
    pub base: f64,
    pub j_max: usize,
}

impl Default for BankSection {
    fn default() -> Self {
        BankSection { base: 4.0, j_max: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngularSpec {
    Named(String),
    Weights(Vec<f64>),
}

impl Default for AngularSpec {
    fn default() -> Self {
        AngularSpec::Named("uniform".into())
    }
}

impl AngularSpec {
    fn build(&self, dim: usize, path: &str) -> Result<Angular> {
        match self {
            AngularSpec::Named(s) if s == "uniform" => Ok(Angular::uniform(dim)),
            AngularSpec::Named(s) => Err(config(path, format!("unknown angular measure `{s}`; use \"uniform\" or a weight list"))),
            AngularSpec::Weights(w) if dim == 1 && w.len() == 2 => Ok(Angular::Line { plus: w[0], minus: w[1] }),
            AngularSpec::Weights(_) if dim == 1 => Err(config(path, "1-d angular weights are [plus, minus]")),
            AngularSpec::Weights(w) => Ok(Angular::Circle { weights: w.clone() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub kind: u8,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Stable {
        alpha: f64,
        #[serde(default)]
        angular: AngularSpec,
    },
    Bernstein {
        phi: PhiSpec,
        #[serde(default)]
        angular: AngularSpec,
    },
    Table {
        radial_csv: PathBuf,
        order: f64,
        #[serde(default)]
        angular: AngularSpec,
    },
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Stable { alpha: 1.5, angular: AngularSpec::default() }
    }
}

impl ModelSpec {
    pub fn build(&self, dim: usize, path: &str) -> Result<LevyModel> {
        let wrap = |e: Error| match e {
            Error::Config { .. } => e,
            other => config(path, other.to_string()),
        };
        match self {
            ModelSpec::Stable { alpha, angular } => {
                LevyModel::stable(dim, *alpha, angular.build(dim, &format!("{path}.angular"))?).map_err(wrap)
            }
            ModelSpec::Bernstein { phi, angular } => {
                let p = BernsteinPhi::new(phi.kind, phi.params.clone()).map_err(|e| config(format!("{path}.phi"), e.to_string()))?;
                LevyModel::bernstein(dim, p, angular.build(dim, &format!("{path}.angular"))?).map_err(wrap)
            }
            ModelSpec::Table { radial_csv, order, angular } => {
                let (r, d) = crate::io::read_pairs(radial_csv).map_err(|e| config(format!("{path}.radial_csv"), e.to_string()))?;
                LevyModel::tabulated(dim, *order, &r, &d, angular.build(dim, &format!("{path}.angular"))?).map_err(wrap)
            }
        }
    }

    fn order_hint(&self) -> f64 {
        match self {
            ModelSpec::Stable { alpha, .. } => *alpha,
            ModelSpec::Bernstein { phi, .. } => BernsteinPhi::new(phi.kind, phi.params.clone())
                .map(|p| 2.0 * p.exponent_at_infinity())
                .unwrap_or(1.0),
            ModelSpec::Table { order, .. } => *order,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScalingSpec {
    Power { alpha: f64 },
    Bernstein { phi: PhiSpec },
    Table { path: PathBuf },
    /// w induced by the operator measure itself
    Induced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub lambda: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { lambda: 1.0, t_end: 1.0, steps: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub seed: u64,
    pub paths: usize,
    pub eps: f64,
    pub probes: usize,
}

impl Default for McSection {
    fn default() -> Self {
        McSection { seed: 0, paths: 100_000, eps: 1e-3, probes: 16 }
    }
}

/// Names accepted in `verify.checks` and `--checks`.
pub const CHECK_NAMES: [&str; 6] =
    ["regularity", "time_regularity", "kernel_decay", "kernel_lipschitz", "norm_equivalence", "probabilistic"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub beta: f64,
    pub kappas: Vec<f64>,
    pub family_size: usize,
    /// fixed separately from `mc.seed` so that spectral records do not move with the MC seed
    pub family_seed: u64,
    pub spread_bound: f64,
    pub kernel_bands: Vec<usize>,
    pub checks: Vec<String>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            beta: 0.5,
            kappas: vec![0.0, 0.5, 1.0],
            family_size: 20,
            family_seed: 1,
            spread_bound: 1e3,
            kernel_bands: vec![1, 2, 3],
            checks: CHECK_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    pub kernel_lattice: KernelLatticeSection,
    pub bank: BankSection,
    pub model: ModelSpec,
    pub reference: Option<ModelSpec>,
    pub scaling: Option<ScalingSpec>,
    pub solver: SolverSection,
    pub mc: McSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

impl RunConfig {
    /// Parses TOML; errors carry the field path and, when known, the line.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let de = toml::Deserializer::parse(text).map_err(|e| {
            let at = e.span().map(|s| format!(" (line {})", line_of(text, s.start))).unwrap_or_default();
            config("<toml>", format!("{}{at}", e.message()))
        })?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let at = inner.span().map(|s| format!(" (line {})", line_of(text, s.start))).unwrap_or_default();
            config(if path == "." { "<root>".to_string() } else { path }, format!("{}{at}", inner.message()))
        })?;
        cfg.normalized()
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| config("--config", format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    /// Every default made explicit and every value range-checked.
    pub fn normalized(mut self) -> Result<RunConfig> {
        let l = &self.lattice;
        if !(l.dim == 1 || l.dim == 2) {
            return Err(config("lattice.dim", format!("must be 1 or 2, got {}", l.dim)));
        }
        Lattice::new(l.dim, l.box_len, l.points).map_err(|e| config("lattice", e.to_string()))?;
        Lattice::new(l.dim, self.kernel_lattice.box_len, self.kernel_lattice.points)
            .map_err(|e| config("kernel_lattice", e.to_string()))?;
        if !(self.bank.base > 3.0 && self.bank.base.is_finite()) {
            return Err(config("bank.base", format!("must exceed 3, got {}", self.bank.base)));
        }
        if self.reference.is_none() {
            self.reference = Some(ModelSpec::Stable { alpha: self.model.order_hint(), angular: AngularSpec::default() });
        }
        if self.scaling.is_none() {
            self.scaling = Some(match &self.model {
                ModelSpec::Stable { alpha, .. } => ScalingSpec::Power { alpha: *alpha },
                ModelSpec::Bernstein { phi, .. } => ScalingSpec::Bernstein { phi: phi.clone() },
                ModelSpec::Table { .. } => ScalingSpec::Induced,
            });
        }
        let s = &self.solver;
        if !(s.lambda >= 0.0 && s.lambda.is_finite()) {
            return Err(config("solver.lambda", format!("must be finite and ≥ 0, got {}", s.lambda)));
        }
        if !(s.t_end > 0.0 && s.t_end.is_finite()) {
            return Err(config("solver.t_end", format!("must be finite and positive, got {}", s.t_end)));
        }
        if s.steps == 0 {
            return Err(config("solver.steps", "must be positive"));
        }
        if self.mc.paths == 0 {
            return Err(config("mc.paths", "must be positive"));
        }
        if !(self.mc.eps > 0.0 && self.mc.eps < 1.0) {
            return Err(config("mc.eps", format!("must lie in (0,1), got {}", self.mc.eps)));
        }
        let v = &mut self.verify;
        if !(v.beta > 0.0 && v.beta.is_finite()) {
            return Err(config("verify.beta", format!("must be positive, got {}", v.beta)));
        }
        if let Some(k) = v.kappas.iter().find(|k| !(0.0..=1.0).contains(*k)) {
            return Err(config("verify.kappas", format!("entries must lie in [0,1], got {k}")));
        }
        if v.kernel_bands.contains(&0) {
            return Err(config("verify.kernel_bands", "bands start at 1"));
        }
        if !(v.spread_bound > 1.0) {
            return Err(config("verify.spread_bound", "must exceed 1"));
        }
        if let Some(c) = v.checks.iter().find(|c| !CHECK_NAMES.contains(&c.as_str())) {
            return Err(config("verify.checks", format!("unknown check `{c}`; known: {}", CHECK_NAMES.join(", "))));
        }
        // canonical order, no repeats
        let wanted = std::mem::take(&mut v.checks);
        v.checks = CHECK_NAMES.iter().filter(|n| wanted.iter().any(|w| w == *n)).map(|s| s.to_string()).collect();
        Ok(self)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// sha256 of the normalized TOML text with the output directory blanked, so that the same
    /// run written to two places carries the same hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        sha256_hex(c.to_toml().as_bytes())
    }

    pub fn model_hash(&self) -> String {
        sha256_hex(toml::to_string(&self.model).expect("model serializes").as_bytes())
    }

    pub fn function_lattice(&self) -> Result<Lattice> {
        Lattice::new(self.lattice.dim, self.lattice.box_len, self.lattice.points)
    }

    pub fn kernel_lattice(&self) -> Result<Lattice> {
        Lattice::new(self.lattice.dim, self.kernel_lattice.box_len, self.kernel_lattice.points)
    }

    pub fn j_max(&self) -> Option<usize> {
        (self.bank.j_max > 0).then_some(self.bank.j_max)
    }

    pub fn operator_model(&self) -> Result<LevyModel> {
        self.model.build(self.lattice.dim, "model")
    }

    pub fn reference_model(&self) -> Result<LevyModel> {
        self.reference.as_ref().unwrap_or(&ModelSpec::default()).build(self.lattice.dim, "reference")
    }

    pub fn scaling_function(&self) -> Result<ScalingFunction> {
        let wrap = |e: Error| config("scaling", e.to_string());
        match self.scaling.as_ref().unwrap_or(&ScalingSpec::Induced) {
            ScalingSpec::Power { alpha } => ScalingFunction::power(*alpha).map_err(wrap),
            ScalingSpec::Bernstein { phi } => {
                let p = BernsteinPhi::new(phi.kind, phi.params.clone()).map_err(|e| config("scaling.phi", e.to_string()))?;
                let m = LevyModel::bernstein(self.lattice.dim, p, Angular::uniform(self.lattice.dim)).map_err(wrap)?;
                ScalingFunction::induced(&m).map_err(wrap)
            }
            ScalingSpec::Table { path } => {
                let (r, w) = crate::io::read_pairs(path).map_err(|e| config("scaling.path", e.to_string()))?;
                ScalingFunction::tabulated(&r, &w).map_err(wrap)
            }
            ScalingSpec::Induced => ScalingFunction::induced(&self.operator_model()?).map_err(wrap),
        }
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig { paths: self.mc.paths, seed: self.mc.seed, eps: self.mc.eps, ..McConfig::default() }
    }
}
