//! C ABI over the levyspace numerics.
//!
//! Objects are opaque handles created by `ls_*_new`/`ls_*_compute` style calls and released
//! with the matching `ls_*_free`. Every fallible call returns an [`LsStatus`]; on failure the
//! message is available from [`ls_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary: they are caught and reported as `LS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use levyspace::config::RunConfig;
use levyspace::levy::{Angular, BernsteinPhi, LevyModel};
use levyspace::lp::{besov_norm, DyadicBank, GridFunction, Lattice};
use levyspace::operators::{apply_fractional, apply_generator, apply_resolvent_power, subordination_constant, Subordination};
use levyspace::scaling::ScalingFunction;
use levyspace::solver::{solve_spectral, Forcing};
use levyspace::symbol::{symbol, SymbolGrid};
use levyspace::verify::run_suite;
use levyspace::Error;
use num_complex::Complex64;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Config = 3,
    Integration = 4,
    Estimation = 5,
    Model = 6,
    Io = 7,
    Parse = 8,
    Input = 9,
    Panic = 10,
}

impl From<&Error> for LsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parameter(_) | Error::Bracket(_) => LsStatus::Domain,
            Error::Config { .. } => LsStatus::Config,
            Error::Integration { .. } => LsStatus::Integration,
            Error::Estimation(_) => LsStatus::Estimation,
            Error::Model(_) | Error::Degenerate(_) => LsStatus::Model,
            Error::Io(_) => LsStatus::Io,
            Error::Parse(_) => LsStatus::Parse,
            Error::Input(_) => LsStatus::Input,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (LsStatus, String)>) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(p) => {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {m}"));
            LsStatus::Panic
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, (LsStatus, String)>;
}

impl<T> Lift<T> for levyspace::Result<T> {
    fn lift(self) -> Result<T, (LsStatus, String)> {
        self.map_err(|e| (LsStatus::from(&e), e.to_string()))
    }
}

fn null(what: &str) -> (LsStatus, String) {
    (LsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, (LsStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (LsStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], (LsStatus, String)> {
    if n == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, n))
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (LsStatus::Parse, format!("{what} is not UTF-8")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Opaque Lévy measure.
pub struct LsModel(LevyModel);
/// Opaque scaling function w.
pub struct LsScaling(ScalingFunction);
/// Opaque periodic lattice.
pub struct LsLattice(Lattice);
/// Opaque complex grid function.
pub struct LsGrid(GridFunction);
/// Opaque symbol ψ tabulated on a lattice.
pub struct LsSymbol(SymbolGrid);
/// Opaque normalized run configuration.
pub struct LsConfig(RunConfig);

/// Message of the last failing call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn ls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

macro_rules! free_fn {
    ($name:ident, $t:ty) => {
        /// Releases a handle; null is ignored.
        ///
        /// # Safety
        /// `p` must come from this library and not be freed twice.
        #[no_mangle]
        pub unsafe extern "C" fn $name(p: *mut $t) {
            if !p.is_null() {
                drop(Box::from_raw(p));
            }
        }
    };
}

free_fn!(ls_model_free, LsModel);
free_fn!(ls_scaling_free, LsScaling);
free_fn!(ls_lattice_free, LsLattice);
free_fn!(ls_grid_free, LsGrid);
free_fn!(ls_symbol_free, LsSymbol);
free_fn!(ls_config_free, LsConfig);

fn angular(dim: usize, w: &[f64]) -> Angular {
    match (dim, w.len()) {
        (_, 0) => Angular::uniform(dim),
        (1, _) => Angular::Line { plus: w[0], minus: *w.get(1).unwrap_or(&w[0]) },
        _ => Angular::Circle { weights: w.to_vec() },
    }
}

/// α-stable measure. `weights` may be null with `n_weights` = 0 for the uniform angular part;
/// otherwise [plus, minus] in 1-d or circle node weights in 2-d.
///
/// # Safety
/// `weights` must point to `n_weights` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_model_stable(dim: usize, alpha: f64, weights: *const f64, n_weights: usize, out_model: *mut *mut LsModel) -> LsStatus {
    guard(|| {
        let o = out(out_model, "out_model")?;
        let w = slice(weights, n_weights, "weights")?;
        *o = boxed(LsModel(LevyModel::stable(dim, alpha, angular(dim, w)).lift()?));
        Ok(())
    })
}

/// Subordinate Brownian measure from a Bernstein function of the given kind (1–4).
///
/// # Safety
/// `params` must point to `n_params` doubles; `out_model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_model_bernstein(dim: usize, kind: u8, params: *const f64, n_params: usize, out_model: *mut *mut LsModel) -> LsStatus {
    guard(|| {
        let o = out(out_model, "out_model")?;
        let p = BernsteinPhi::new(kind, slice(params, n_params, "params")?.to_vec()).lift()?;
        *o = boxed(LsModel(LevyModel::bernstein(dim, p, Angular::uniform(dim)).lift()?));
        Ok(())
    })
}

/// Order of the measure.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_model_order(model: *const LsModel, out_order: *mut f64) -> LsStatus {
    guard(|| {
        *out(out_order, "out_order")? = obj(model, "model")?.0.order();
        Ok(())
    })
}

/// ψ(ξ) at a single frequency (ξ₁ ignored in 1-d).
///
/// # Safety
/// Handles must be valid or null; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ls_model_symbol(model: *const LsModel, xi0: f64, xi1: f64, out_re: *mut f64, out_im: *mut f64) -> LsStatus {
    guard(|| {
        let m = obj(model, "model")?;
        let (re, im) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let v = symbol(&m.0, [xi0, xi1]).lift()?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// w(r) = r^α.
///
/// # Safety
/// `out_scaling` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_scaling_power(alpha: f64, out_scaling: *mut *mut LsScaling) -> LsStatus {
    guard(|| {
        *out(out_scaling, "out_scaling")? = boxed(LsScaling(ScalingFunction::power(alpha).lift()?));
        Ok(())
    })
}

/// Scaling function induced by a measure.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_scaling_induced(model: *const LsModel, out_scaling: *mut *mut LsScaling) -> LsStatus {
    guard(|| {
        let m = obj(model, "model")?;
        *out(out_scaling, "out_scaling")? = boxed(LsScaling(ScalingFunction::induced(&m.0).lift()?));
        Ok(())
    })
}

/// w(r).
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_scaling_w(sf: *const LsScaling, r: f64, out_w: *mut f64) -> LsStatus {
    guard(|| {
        let s = obj(sf, "sf")?;
        *out(out_w, "out_w")? = s.0.w(r).lift()?;
        Ok(())
    })
}

/// Lattice of `points` nodes per axis on a box of side `box_len`.
///
/// # Safety
/// `out_lattice` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_lattice_new(dim: usize, box_len: f64, points: usize, out_lattice: *mut *mut LsLattice) -> LsStatus {
    guard(|| {
        *out(out_lattice, "out_lattice")? = boxed(LsLattice(Lattice::new(dim, box_len, points).lift()?));
        Ok(())
    })
}

/// Total number of nodes (points^dim); 0 for a null handle.
///
/// # Safety
/// `lattice` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_lattice_len(lattice: *const LsLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.len())
}

/// Grid function from separate real and imaginary arrays of length `n` (imag may be null).
///
/// # Safety
/// Arrays must hold `n` doubles; handles valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_grid_new(lattice: *const LsLattice, re: *const f64, im: *const f64, n: usize, out_grid: *mut *mut LsGrid) -> LsStatus {
    guard(|| {
        let l = obj(lattice, "lattice")?;
        let o = out(out_grid, "out_grid")?;
        let r = slice(re, n, "re")?;
        let i = if im.is_null() { None } else { Some(slice(im, n, "im")?) };
        let v = (0..n).map(|k| Complex64::new(r[k], i.map_or(0.0, |i| i[k]))).collect();
        *o = boxed(LsGrid(GridFunction::new(&l.0, v).lift()?));
        Ok(())
    })
}

/// Copies values into caller arrays of length `n` (must equal the lattice size; imag may be null).
///
/// # Safety
/// Arrays must have room for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_grid_values(grid: *const LsGrid, re: *mut f64, im: *mut f64, n: usize) -> LsStatus {
    guard(|| {
        let g = obj(grid, "grid")?;
        let v = g.0.values();
        if n != v.len() {
            return Err((LsStatus::Input, format!("buffer holds {n} values, grid has {}", v.len())));
        }
        if re.is_null() {
            return Err(null("re"));
        }
        for (k, c) in v.iter().enumerate() {
            *re.add(k) = c.re;
            if !im.is_null() {
                *im.add(k) = c.im;
            }
        }
        Ok(())
    })
}

/// Loads a grid function (.csv text or binary block).
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ls_grid_load(path: *const c_char, out_grid: *mut *mut LsGrid) -> LsStatus {
    guard(|| {
        let p = text(path, "path")?;
        let o = out(out_grid, "out_grid")?;
        *o = boxed(LsGrid(GridFunction::load(Path::new(p)).lift()?));
        Ok(())
    })
}

/// Saves a grid function; the format follows the extension.
///
/// # Safety
/// `path` must be a NUL-terminated string; handles valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_grid_save(grid: *const LsGrid, path: *const c_char) -> LsStatus {
    guard(|| {
        let g = obj(grid, "grid")?;
        g.0.save(Path::new(text(path, "path")?)).lift()
    })
}

/// ψ tabulated on every lattice frequency.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_symbol_compute(model: *const LsModel, lattice: *const LsLattice, out_symbol: *mut *mut LsSymbol) -> LsStatus {
    guard(|| {
        let m = obj(model, "model")?;
        let l = obj(lattice, "lattice")?;
        *out(out_symbol, "out_symbol")? = boxed(LsSymbol(SymbolGrid::compute(&m.0, &l.0).lift()?));
        Ok(())
    })
}

/// L u.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_apply_generator(grid: *const LsGrid, sym: *const LsSymbol, out_grid: *mut *mut LsGrid) -> LsStatus {
    guard(|| {
        let (g, s) = (obj(grid, "grid")?, obj(sym, "symbol")?);
        *out(out_grid, "out_grid")? = boxed(LsGrid(apply_generator(&g.0, &s.0).lift()?));
        Ok(())
    })
}

/// L^κ u for κ ∈ [0, 2).
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_apply_fractional(grid: *const LsGrid, sym: *const LsSymbol, kappa: f64, out_grid: *mut *mut LsGrid) -> LsStatus {
    guard(|| {
        let (g, s) = (obj(grid, "grid")?, obj(sym, "symbol")?);
        *out(out_grid, "out_grid")? = boxed(LsGrid(apply_fractional(&g.0, &s.0, kappa).lift()?));
        Ok(())
    })
}

/// (aI − L)^{sign·κ} u with sign = ±1.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_apply_resolvent_power(
    grid: *const LsGrid,
    sym: *const LsSymbol,
    a: f64,
    kappa: f64,
    sign: i8,
    out_grid: *mut *mut LsGrid,
) -> LsStatus {
    guard(|| {
        let (g, s) = (obj(grid, "grid")?, obj(sym, "symbol")?);
        *out(out_grid, "out_grid")? = boxed(LsGrid(apply_resolvent_power(&g.0, &s.0, a, kappa, sign).lift()?));
        Ok(())
    })
}

/// |u|_{β,∞} with a dyadic bank of base N on the grid's lattice.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_besov_norm(grid: *const LsGrid, sf: *const LsScaling, base: f64, beta: f64, out_norm: *mut f64) -> LsStatus {
    guard(|| {
        let (g, s) = (obj(grid, "grid")?, obj(sf, "sf")?);
        let o = out(out_norm, "out_norm")?;
        let bank = DyadicBank::new(base, g.0.lattice(), None).lift()?;
        *o = besov_norm(&g.0, &bank, &s.0, beta).lift()?;
        Ok(())
    })
}

/// Solves ∂ₜu = Lu − λu + f, u(0) = 0, with constant f over `steps` steps and returns u(T).
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_solve(
    forcing: *const LsGrid,
    sym: *const LsSymbol,
    lambda: f64,
    t_end: f64,
    steps: usize,
    out_grid: *mut *mut LsGrid,
) -> LsStatus {
    guard(|| {
        let (f, s) = (obj(forcing, "forcing")?, obj(sym, "symbol")?);
        let o = out(out_grid, "out_grid")?;
        let r = solve_spectral(&Forcing::Constant(f.0.clone()), &s.0, lambda, t_end, steps).lift()?;
        *o = boxed(LsGrid(r.states.last().cloned().expect("solver returns the initial node")));
        Ok(())
    })
}

/// ∫₀^∞ t^{−κ−1}(1 − e^{−t}) dt (`which` = 0) or ∫₀^∞ t^{κ−1}e^{−t} dt (`which` = 1).
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_subordination_constant(kappa: f64, which: u32, out_value: *mut f64) -> LsStatus {
    guard(|| {
        let w = match which {
            0 => Subordination::Fractional,
            1 => Subordination::Resolvent,
            _ => return Err((LsStatus::Domain, format!("which must be 0 or 1, got {which}"))),
        };
        *out(out_value, "out_value")? = subordination_constant(kappa, w).lift()?;
        Ok(())
    })
}

/// Parses and normalizes a TOML run configuration.
///
/// # Safety
/// `toml_text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ls_config_parse(toml_text: *const c_char, out_config: *mut *mut LsConfig) -> LsStatus {
    guard(|| {
        let t = text(toml_text, "toml_text")?;
        *out(out_config, "out_config")? = boxed(LsConfig(RunConfig::parse(t).lift()?));
        Ok(())
    })
}

/// Normalized TOML form; release with `ls_string_free`.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_config_to_toml(config: *const LsConfig, out_text: *mut *mut c_char) -> LsStatus {
    guard(|| {
        let c = obj(config, "config")?;
        let s = CString::new(c.0.to_toml()).map_err(|e| (LsStatus::Input, e.to_string()))?;
        *out(out_text, "out_text")? = s.into_raw();
        Ok(())
    })
}

/// Runs the configured verification suite; the report is JSON, released with `ls_string_free`.
/// `out_all_pass` receives 1 when every record passes.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ls_verify(config: *const LsConfig, out_json: *mut *mut c_char, out_all_pass: *mut i32) -> LsStatus {
    guard(|| {
        let c = obj(config, "config")?;
        let (oj, op) = (out(out_json, "out_json")?, out(out_all_pass, "out_all_pass")?);
        let r = run_suite(&c.0).lift()?;
        let s = CString::new(r.to_json().lift()?).map_err(|e| (LsStatus::Input, e.to_string()))?;
        *op = i32::from(r.all_pass());
        *oj = s.into_raw();
        Ok(())
    })
}
