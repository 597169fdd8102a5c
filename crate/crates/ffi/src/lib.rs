//! C ABI over `opo-sideband`.
//!
//! Objects cross the boundary as opaque handles created and destroyed by this
//! library. Every fallible call returns an [`OpoStatus`]; the numeric values of
//! the first four match the exit codes of the `opo-sideband` binary. After a
//! non-zero status, `opo_last_error` describes what went wrong on the calling
//! thread.
//!
//! Matrices are copied out row-major into caller-owned `double` buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use opo_sideband::config::OpoConfig;
use opo_sideband::pipeline::{solve, Solution};
use opo_sideband::validate::validate;
use opo_sideband::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpoStatus {
    Ok = 0,
    ValidationFailure = 1,
    ConfigError = 2,
    PhysicsBoundary = 3,
    NullPointer = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// Opaque model configuration.
pub struct OpoConfigHandle {
    inner: OpoConfig,
}

/// Opaque solved operating point: covariance, S/A blocks and physicality report.
pub struct OpoSolution {
    inner: Solution,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut buf = e.borrow_mut();
        buf.clear();
        buf.extend(msg.bytes().filter(|&b| b != 0));
    });
}

fn fail(status: OpoStatus, msg: &str) -> OpoStatus {
    set_last_error(msg);
    status
}

fn from_error(e: &Error) -> OpoStatus {
    let status = match e.exit_code() {
        2 => OpoStatus::ConfigError,
        3 => OpoStatus::PhysicsBoundary,
        _ => OpoStatus::ValidationFailure,
    };
    fail(status, &e.to_string())
}

/// Runs `f`, turning a panic into [`OpoStatus::Internal`].
fn guard(f: impl FnOnce() -> OpoStatus) -> OpoStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(OpoStatus::Internal, "internal panic"))
}

unsafe fn config_mut<'a>(h: *mut OpoConfigHandle) -> Result<&'a mut OpoConfig, OpoStatus> {
    h.as_mut().map(|h| &mut h.inner).ok_or_else(|| fail(OpoStatus::NullPointer, "config handle is null"))
}

unsafe fn solution_ref<'a>(h: *const OpoSolution) -> Result<&'a Solution, OpoStatus> {
    h.as_ref().map(|h| &h.inner).ok_or_else(|| fail(OpoStatus::NullPointer, "solution handle is null"))
}

unsafe fn copy_out(src: impl Iterator<Item = f64>, n: usize, out: *mut f64, len: usize) -> OpoStatus {
    if out.is_null() {
        return fail(OpoStatus::NullPointer, "output buffer is null");
    }
    if len < n {
        return fail(OpoStatus::BufferTooSmall, &format!("buffer holds {len} values, {n} needed"));
    }
    for (k, x) in src.enumerate() {
        *out.add(k) = x;
    }
    OpoStatus::Ok
}

/// Copies the message for the last failure on this thread into `buf`,
/// NUL-terminated and truncated to `len` bytes. Returns the full message
/// length excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn opo_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// The bundled reference configuration. Release with `opo_config_free`.
#[no_mangle]
pub extern "C" fn opo_config_reference() -> *mut OpoConfigHandle {
    Box::into_raw(Box::new(OpoConfigHandle { inner: OpoConfig::reference() }))
}

/// Parses a TOML configuration.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opo_config_from_toml(text: *const c_char, out: *mut *mut OpoConfigHandle) -> OpoStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(OpoStatus::NullPointer, "null argument to opo_config_from_toml");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(OpoStatus::ConfigError, "configuration is not valid UTF-8");
        };
        match OpoConfig::from_toml_str(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(OpoConfigHandle { inner: cfg }));
                OpoStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `cfg` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn opo_config_free(cfg: *mut OpoConfigHandle) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn edit(cfg: *mut OpoConfigHandle, f: impl FnOnce(&mut OpoConfig)) -> OpoStatus {
    guard(|| match config_mut(cfg) {
        Ok(c) => {
            let mut next = c.clone();
            f(&mut next);
            match next.validate() {
                Ok(()) => {
                    *c = next;
                    OpoStatus::Ok
                }
                Err(e) => from_error(&e),
            }
        }
        Err(s) => s,
    })
}

/// Pump power in units of threshold. The handle is unchanged on error.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn opo_config_set_sigma(cfg: *mut OpoConfigHandle, sigma: f64) -> OpoStatus {
    edit(cfg, |c| c.operating_point.sigma = sigma)
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn opo_config_set_omega_hz(cfg: *mut OpoConfigHandle, hz: f64) -> OpoStatus {
    edit(cfg, |c| c.operating_point.omega_analysis_hz = hz)
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn opo_config_set_phonons(cfg: *mut OpoConfigHandle, enabled: bool) -> OpoStatus {
    edit(cfg, |c| c.phonons.enabled = enabled)
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn opo_config_set_detection(cfg: *mut OpoConfigHandle, enabled: bool) -> OpoStatus {
    edit(cfg, |c| c.detection.enabled = enabled)
}

/// Solves the configured operating point. Release with `opo_solution_free`.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opo_solve(cfg: *const OpoConfigHandle, out: *mut *mut OpoSolution) -> OpoStatus {
    guard(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(OpoStatus::NullPointer, "config handle is null");
        };
        if out.is_null() {
            return fail(OpoStatus::NullPointer, "output pointer is null");
        }
        match solve(&cfg.inner) {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(OpoSolution { inner: sol }));
                OpoStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Runs the invariant and oracle suite. Returns `Ok` when every check passes,
/// `ValidationFailure` naming the failed checks otherwise, and
/// `PhysicsBoundary` when the operating point sits on an oscillation boundary.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn opo_validate(cfg: *const OpoConfigHandle) -> OpoStatus {
    guard(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(OpoStatus::NullPointer, "config handle is null");
        };
        match validate(&cfg.inner) {
            Ok(summary) if summary.passed() => OpoStatus::Ok,
            Ok(summary) => {
                let names: Vec<&str> = summary.failures().map(|r| r.name.as_str()).collect();
                let status =
                    if summary.at_boundary { OpoStatus::PhysicsBoundary } else { OpoStatus::ValidationFailure };
                fail(status, &format!("failed checks: {}", names.join(", ")))
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `sol` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn opo_solution_free(sol: *mut OpoSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Side length of the frequency-basis covariance (12), or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opo_solution_dim(sol: *const OpoSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.covariance.dim())
}

/// Row-major copy of the frequency-basis covariance into `out[0..dim*dim]`.
///
/// # Safety
/// `sol` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn opo_solution_covariance(sol: *const OpoSolution, out: *mut f64, len: usize) -> OpoStatus {
    guard(|| match solution_ref(sol) {
        Ok(s) => {
            let m = &s.covariance.matrix;
            let n = m.nrows();
            copy_out((0..n * n).map(|k| m[(k / n, k % n)]), n * n, out, len)
        }
        Err(st) => st,
    })
}

/// Row-major 6×6 copies of `V_s`, `V_a` and `C_sa`; each buffer holds 36 doubles.
///
/// # Safety
/// `sol` must be a live handle and each buffer must hold 36 doubles.
#[no_mangle]
pub unsafe extern "C" fn opo_solution_sa_blocks(
    sol: *const OpoSolution,
    v_s: *mut f64,
    v_a: *mut f64,
    c_sa: *mut f64,
) -> OpoStatus {
    guard(|| match solution_ref(sol) {
        Ok(s) => {
            for (m, out) in [(&s.blocks.v_s, v_s), (&s.blocks.v_a, v_a), (&s.blocks.c_sa, c_sa)] {
                let st = copy_out((0..36).map(|k| m[(k / 6, k % 6)]), 36, out, 36);
                if st != OpoStatus::Ok {
                    return st;
                }
            }
            OpoStatus::Ok
        }
        Err(st) => st,
    })
}

/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opo_solution_purity(sol: *const OpoSolution, out: *mut f64) -> OpoStatus {
    guard(|| match solution_ref(sol) {
        Ok(s) => copy_out(std::iter::once(s.report.purity), 1, out, 1),
        Err(st) => st,
    })
}

/// Smallest eigenvalue of `V + iΩ`; non-negative for a physical state.
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opo_solution_min_eigenvalue(sol: *const OpoSolution, out: *mut f64) -> OpoStatus {
    guard(|| match solution_ref(sol) {
        Ok(s) => copy_out(std::iter::once(s.report.min_eigenvalue), 1, out, 1),
        Err(st) => st,
    })
}
