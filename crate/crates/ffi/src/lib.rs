//! C ABI over `locc-core`.
//!
//! Ensembles live behind an opaque `LoccEnsemble` handle. Every call returns a
//! `LoccStatus`; on failure `locc_last_error_message` describes the error for
//! the calling thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use locc_core::discrimination::{chi_basis_protocol, optimize_projective, simulate_one_way};
use locc_core::ensembles::{self, Party, ProductEnsemble};
use locc_core::nogo::{feasibility_analysis, Verdict};
use locc_core::Error;

/// Opaque ensemble handle.
pub struct LoccEnsemble {
    inner: ProductEnsemble,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Io = 4,
    Parse = 5,
    Numeric = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoccParty {
    Alice = 0,
    Bob = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoccVerdict {
    NoProgress = 0,
    ProgressPossible = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> LoccStatus {
    match e {
        Error::DimensionMismatch { .. } => LoccStatus::DimensionMismatch,
        Error::Io(_) => LoccStatus::Io,
        Error::Parse(_) => LoccStatus::Parse,
        Error::NotPositive { .. } | Error::DegenerateDraw { .. } => LoccStatus::Numeric,
        _ => LoccStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (LoccStatus, String)>) -> LoccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LoccStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LoccStatus::Panic
        }
    }
}

fn core<T>(r: locc_core::Result<T>) -> Result<T, (LoccStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (LoccStatus, String) {
    (LoccStatus::NullPointer, format!("{what} is null"))
}

unsafe fn emit(out: *mut *mut LoccEnsemble, e: locc_core::Result<ProductEnsemble>) -> Result<(), (LoccStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let inner = core(e)?;
    *out = Box::into_raw(Box::new(LoccEnsemble { inner }));
    Ok(())
}

unsafe fn handle<'a>(e: *const LoccEnsemble) -> Result<&'a ProductEnsemble, (LoccStatus, String)> {
    e.as_ref().map(|h| &h.inner).ok_or_else(|| null("ensemble"))
}

/// Message for the last failing call on this thread (empty if none). Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn locc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn locc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn locc_ensemble_four(out: *mut *mut LoccEnsemble) -> LoccStatus {
    guard(|| emit(out, Ok(ensembles::four_state())))
}

/// # Safety
/// See [`locc_ensemble_four`].
#[no_mangle]
pub unsafe extern "C" fn locc_ensemble_four_general(theta: f64, out: *mut *mut LoccEnsemble) -> LoccStatus {
    guard(|| emit(out, ensembles::four_state_general(theta)))
}

/// # Safety
/// See [`locc_ensemble_four`].
#[no_mangle]
pub unsafe extern "C" fn locc_ensemble_nine(out: *mut *mut LoccEnsemble) -> LoccStatus {
    guard(|| emit(out, Ok(ensembles::nine_state())))
}

/// # Safety
/// See [`locc_ensemble_four`].
#[no_mangle]
pub unsafe extern "C" fn locc_ensemble_nine_general(
    eta: f64,
    xi: f64,
    theta: f64,
    gamma: f64,
    out: *mut *mut LoccEnsemble,
) -> LoccStatus {
    guard(|| emit(out, ensembles::nine_state_general(eta, xi, theta, gamma)))
}

/// # Safety
/// See [`locc_ensemble_four`].
#[no_mangle]
pub unsafe extern "C" fn locc_ensemble_computational(d_a: usize, d_b: usize, out: *mut *mut LoccEnsemble) -> LoccStatus {
    guard(|| emit(out, ensembles::computational(d_a, d_b)))
}

/// Loads an ensemble file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` as in [`locc_ensemble_four`].
#[no_mangle]
pub unsafe extern "C" fn locc_ensemble_load(path: *const c_char, out: *mut *mut LoccEnsemble) -> LoccStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (LoccStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        emit(out, ensembles::load_ensemble(path))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `e` must come from a `locc_ensemble_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn locc_ensemble_free(e: *mut LoccEnsemble) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Number of states and local dimensions. Any output pointer may be null.
///
/// # Safety
/// `e` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_ensemble_shape(
    e: *const LoccEnsemble,
    states: *mut usize,
    d_a: *mut usize,
    d_b: *mut usize,
) -> LoccStatus {
    guard(|| {
        let e = handle(e)?;
        for (p, v) in [(states, e.len()), (d_a, e.d_a()), (d_b, e.d_b())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Best projective first measurement for Alice (qubit ensembles only).
///
/// # Safety
/// `e` must be a live handle; `value` and `angle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_optimize_projective(e: *const LoccEnsemble, value: *mut f64, angle: *mut f64) -> LoccStatus {
    guard(|| {
        let e = handle(e)?;
        if value.is_null() || angle.is_null() {
            return Err(null("output"));
        }
        let opt = core(optimize_projective(e))?;
        *value = opt.result.average_success;
        *angle = opt.best_angle;
        Ok(())
    })
}

/// Runs the χ-basis protocol. `per_state` receives one value per state and
/// must hold at least `len` doubles; `average` may be null.
///
/// # Safety
/// `e` must be a live handle; `per_state` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn locc_simulate_chi(
    e: *const LoccEnsemble,
    per_state: *mut f64,
    len: usize,
    average: *mut f64,
) -> LoccStatus {
    guard(|| {
        let e = handle(e)?;
        if per_state.is_null() {
            return Err(null("per_state"));
        }
        let r = core(simulate_one_way(e, &chi_basis_protocol()))?;
        if len < r.per_state_success.len() {
            return Err((
                LoccStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", r.per_state_success.len()),
            ));
        }
        std::slice::from_raw_parts_mut(per_state, r.per_state_success.len()).copy_from_slice(&r.per_state_success);
        if let Some(a) = average.as_mut() {
            *a = r.average_success;
        }
        Ok(())
    })
}

/// Zero-error feasibility for `party` measuring first.
///
/// # Safety
/// `e` must be a live handle; `nullspace_dim` and `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn locc_feasibility(
    e: *const LoccEnsemble,
    party: LoccParty,
    nullspace_dim: *mut usize,
    verdict: *mut LoccVerdict,
) -> LoccStatus {
    guard(|| {
        let e = handle(e)?;
        if nullspace_dim.is_null() || verdict.is_null() {
            return Err(null("output"));
        }
        let party = match party {
            LoccParty::Alice => Party::Alice,
            LoccParty::Bob => Party::Bob,
        };
        let r = core(feasibility_analysis(e, party))?;
        *nullspace_dim = r.nullspace_dim;
        *verdict = match r.verdict {
            Verdict::NoProgress => LoccVerdict::NoProgress,
            Verdict::ProgressPossible => LoccVerdict::ProgressPossible,
        };
        Ok(())
    })
}
