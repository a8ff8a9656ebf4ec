//! C ABI over `levy_schemes`.
//!
//! Every entry point returns an [`LsStatus`]; on failure the message is
//! available from [`ls_last_error_message`] on the same thread. Objects are
//! opaque handles released with their `_free` function. Panics are caught
//! at the boundary and reported as [`LsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levy_schemes::analysis::optimality_constant;
use levy_schemes::config::SdeConfig;
use levy_schemes::levy_measure::{tail_mass, MeasureSpec, SharedMeasure, Side};
use levy_schemes::mc::{build_scheme, mc_estimate, Method};
use levy_schemes::schemes::{FiniteActivityScheme, SchemeKind};
use levy_schemes::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Domain = 4,
    Unsupported = 5,
    EpsilonTooLarge = 6,
    Numerical = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Scheme family selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsSchemeKind {
    Truncation = 0,
    GaussianCompensation = 1,
    ThreeMoment = 2,
    HighOrder = 3,
}

impl From<LsSchemeKind> for SchemeKind {
    fn from(k: LsSchemeKind) -> Self {
        match k {
            LsSchemeKind::Truncation => SchemeKind::Truncation,
            LsSchemeKind::GaussianCompensation => SchemeKind::GaussianCompensation,
            LsSchemeKind::ThreeMoment => SchemeKind::ThreeMoment,
            LsSchemeKind::HighOrder => SchemeKind::HighOrder,
        }
    }
}

/// Monte Carlo estimate of `E[f(X₁)]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LsMcResult {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: u64,
    pub avg_jumps_per_path: f64,
    pub failures: u64,
}

/// Opaque Lévy measure.
pub struct LsMeasure {
    inner: SharedMeasure,
}

/// Opaque finite-activity scheme.
pub struct LsScheme {
    inner: FiniteActivityScheme,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::Config(_) | Error::Io(_) => LsStatus::Config,
        Error::Domain(_) => LsStatus::Domain,
        Error::Unsupported(_) => LsStatus::Unsupported,
        Error::EpsilonTooLarge { .. } => LsStatus::EpsilonTooLarge,
        _ => LsStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), LsStatus>) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            LsStatus::Panic
        }
    }
}

fn lib<T>(r: levy_schemes::Result<T>) -> Result<T, LsStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null() -> LsStatus {
    set_error("null pointer argument".into());
    LsStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, LsStatus> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| {
        set_error(format!("invalid UTF-8: {e}"));
        LsStatus::InvalidUtf8
    })
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, LsStatus> {
    p.as_mut().ok_or_else(null)
}

unsafe fn in_arg<'a, T>(p: *const T) -> Result<&'a T, LsStatus> {
    p.as_ref().ok_or_else(null)
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Clears the last error message of this thread.
#[no_mangle]
pub extern "C" fn ls_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a measure from its JSON descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_measure_from_json(json: *const c_char, out: *mut *mut LsMeasure) -> LsStatus {
    guard(|| {
        let out = out_arg(out)?;
        let spec = lib(MeasureSpec::from_json(str_arg(json)?))?;
        let inner = lib(spec.build())?;
        *out = Box::into_raw(Box::new(LsMeasure { inner }));
        Ok(())
    })
}

/// Releases a measure. NULL is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_measure_free(m: *mut LsMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `ν(|x| > r)`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_measure_tail_mass(m: *const LsMeasure, r: f64, out: *mut f64) -> LsStatus {
    guard(|| {
        let m = in_arg(m)?;
        let out = out_arg(out)?;
        *out = lib(tail_mass(m.inner.as_ref(), r, Side::Both))?;
        Ok(())
    })
}

/// Builds a scheme at truncation level `epsilon`; `n` is used by the
/// high-order kind only.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_scheme_build(
    m: *const LsMeasure,
    kind: LsSchemeKind,
    epsilon: f64,
    n: u32,
    out: *mut *mut LsScheme,
) -> LsStatus {
    guard(|| {
        let m = in_arg(m)?;
        let out = out_arg(out)?;
        let inner = lib(build_scheme(&m.inner, kind.into(), epsilon, n as usize))?;
        *out = Box::into_raw(Box::new(LsScheme { inner }));
        Ok(())
    })
}

/// Releases a scheme. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_scheme_free(s: *mut LsScheme) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Total intensity `λ_ε`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_scheme_lambda(s: *const LsScheme, out: *mut f64) -> LsStatus {
    guard(|| {
        *out_arg(out)? = in_arg(s)?.inner.lambda_eps;
        Ok(())
    })
}

/// Drift `γ_ε`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_scheme_gamma(s: *const LsScheme, out: *mut f64) -> LsStatus {
    guard(|| {
        *out_arg(out)? = in_arg(s)?.inner.gamma_eps;
        Ok(())
    })
}

/// Copies atom locations and rates. `*count` receives the number of atoms
/// even when `capacity` is too small (then `BufferTooSmall` is returned).
/// `locations`/`rates` may be NULL when `capacity` is 0.
///
/// # Safety
/// The arrays must hold `capacity` doubles; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_scheme_atoms(
    s: *const LsScheme,
    locations: *mut f64,
    rates: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> LsStatus {
    guard(|| {
        let s = in_arg(s)?;
        let count = out_arg(count)?;
        let atoms = &s.inner.atoms;
        *count = atoms.len();
        if capacity < atoms.len() {
            set_error(format!("need room for {} atoms, got {capacity}", atoms.len()));
            return Err(LsStatus::BufferTooSmall);
        }
        if atoms.is_empty() {
            return Ok(());
        }
        if locations.is_null() || rates.is_null() {
            return Err(null());
        }
        for (i, &(x, r)) in atoms.iter().enumerate() {
            *locations.add(i) = x;
            *rates.add(i) = r;
        }
        Ok(())
    })
}

/// `∫ x^k ν_ε(dx)` for `k ≥ 1`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_scheme_moment(s: *const LsScheme, k: i32, out: *mut f64) -> LsStatus {
    guard(|| {
        let s = in_arg(s)?;
        let out = out_arg(out)?;
        if k < 1 {
            set_error(format!("moment order must be >= 1, got {k}"));
            return Err(LsStatus::Domain);
        }
        *out = lib(s.inner.moment(k))?;
        Ok(())
    })
}

/// JSON form of the scheme; release with [`ls_string_free`].
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_scheme_to_json(s: *const LsScheme, out: *mut *mut c_char) -> LsStatus {
    guard(|| {
        let s = in_arg(s)?;
        let out = out_arg(out)?;
        let json = lib(s.inner.to_json())?;
        *out = CString::new(json).map_err(|_| LsStatus::Numerical)?.into_raw();
        Ok(())
    })
}

/// Rebuilds a scheme from [`ls_scheme_to_json`] output.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_scheme_from_json(json: *const c_char, out: *mut *mut LsScheme) -> LsStatus {
    guard(|| {
        let out = out_arg(out)?;
        let inner = lib(FiniteActivityScheme::from_json(str_arg(json)?))?;
        *out = Box::into_raw(Box::new(LsScheme { inner }));
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

/// Jump-adapted Monte Carlo estimate for the SDE given as JSON, e.g.
/// `{"coefficient": {"type": "sin", "a": 1}, "x0": 1, "payoff": {"type": "cos", "omega": 2}}`.
/// `workers = 0` selects the default thread count.
///
/// # Safety
/// `s` must be a live handle, `sde_json` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_estimate(
    s: *const LsScheme,
    sde_json: *const c_char,
    n_paths: u64,
    seed: u64,
    workers: u32,
    out: *mut LsMcResult,
) -> LsStatus {
    guard(|| {
        let s = in_arg(s)?;
        let out = out_arg(out)?;
        let p = lib(SdeConfig::from_json(str_arg(sde_json)?).and_then(|c| c.problem()))?;
        let method = lib(Method::jump_adapted(&s.inner))?;
        let workers = (workers > 0).then_some(workers as usize);
        let r = lib(mc_estimate(&p, &method, n_paths, seed, workers))?;
        *out = LsMcResult {
            mean: r.mean,
            stderr: r.stderr,
            n_paths: r.n_paths,
            avg_jumps_per_path: r.avg_jumps_per_path,
            failures: r.failures,
        };
        Ok(())
    })
}

/// `(3−α)(2/(2−α))^{4/α}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_optimality_constant(alpha: f64, out: *mut f64) -> LsStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = lib(optimality_constant(alpha))?;
        Ok(())
    })
}
