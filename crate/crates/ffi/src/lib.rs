//! C ABI over `signed-harmonics`.
//!
//! Results come back through opaque handles that the caller releases with
//! the matching `*_free`. Every entry point returns an [`ShStatus`]; on
//! failure the message is kept per thread and can be fetched with
//! [`sh_last_error_message`]. Strings handed out by this library must be
//! released with [`sh_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;
use signed_harmonics::density::{self, DistributionQuery, QuadratureSpec};
use signed_harmonics::greedy::{self, GreedyRun, GreedyTarget};
use signed_harmonics::minsearch::{self, SearchConfig, SearchResult};
use signed_harmonics::{bounds_lab, Error, ExactRational};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Precondition = 5,
    Resource = 6,
    Precision = 7,
    Internal = 8,
    Panic = 9,
}

impl From<&Error> for ShStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) => ShStatus::Parse,
            Error::Domain(_) => ShStatus::Domain,
            Error::Precondition(_) | Error::Config(_) => ShStatus::Precondition,
            Error::Resource { .. } => ShStatus::Resource,
            Error::Precision { .. } => ShStatus::Precision,
            Error::Contract(_) | Error::Io(_) | Error::Serialization(_) => ShStatus::Internal,
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

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, turning errors and panics into a status plus the thread's last
/// error message.
fn guard(f: impl FnOnce() -> Result<(), (ShStatus, String)>) -> ShStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ShStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            ShStatus::Panic
        }
    }
}

fn lib<T>(r: signed_harmonics::Result<T>) -> Result<T, (ShStatus, String)> {
    r.map_err(|e| (ShStatus::from(&e), e.to_string()))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (ShStatus, String)> {
    if p.is_null() {
        return Err((ShStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ShStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn check_out<T>(out: *mut T) -> Result<(), (ShStatus, String)> {
    if out.is_null() {
        Err((ShStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn sh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the calling thread's last error message, or null if the last
/// call succeeded. Free with [`sh_string_free`].
#[no_mangle]
pub extern "C" fn sh_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact minimum search result.
pub struct ShMinResult {
    inner: SearchResult,
}

/// Computes `m_N(tau)`. `tau` is `p/q` or a decimal literal; `split` and
/// `max_half_size` use the library defaults when 0.
///
/// # Safety
/// `tau` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sh_min_abs(
    n: u32,
    tau: *const c_char,
    split: u32,
    max_half_size: u64,
    out: *mut *mut ShMinResult,
) -> ShStatus {
    guard(|| {
        check_out(out)?;
        let tau: ExactRational = lib(read_str(tau, "tau")?.parse())?;
        let mut cfg = SearchConfig::new(n).with_tau(tau);
        if split != 0 {
            cfg = cfg.with_split(split);
        }
        if max_half_size != 0 {
            cfg = cfg.with_max_half_size(max_half_size);
        }
        let inner = lib(minsearch::min_abs(&cfg))?;
        *out = Box::into_raw(Box::new(ShMinResult { inner }));
        Ok(())
    })
}

/// # Safety
/// `r` must be a live handle from [`sh_min_abs`].
#[no_mangle]
pub unsafe extern "C" fn sh_min_result_n(r: *const ShMinResult) -> u32 {
    r.as_ref().map_or(0, |r| r.inner.n)
}

/// `m_N(tau)` as `p/q`. Free with [`sh_string_free`].
///
/// # Safety
/// `r` must be a live handle from [`sh_min_abs`].
#[no_mangle]
pub unsafe extern "C" fn sh_min_result_value(r: *const ShMinResult) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| to_c_string(r.inner.m_value.to_string()))
}

/// `m_N(tau) * lcm(1..N)` as `p/q` (an integer for integer tau).
///
/// # Safety
/// `r` must be a live handle from [`sh_min_abs`].
#[no_mangle]
pub unsafe extern "C" fn sh_min_result_times_lcm(r: *const ShMinResult) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| to_c_string(r.inner.m_times_lcm.to_string()))
}

/// Witness signs as a string of `+` and `-`.
///
/// # Safety
/// `r` must be a live handle from [`sh_min_abs`].
#[no_mangle]
pub unsafe extern "C" fn sh_min_result_witness(r: *const ShMinResult) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| to_c_string(r.inner.witness.to_string()))
}

/// # Safety
/// `r` must be null or a handle from [`sh_min_abs`] that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sh_min_result_free(r: *mut ShMinResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Greedy run towards a target.
pub struct ShGreedyRun {
    inner: GreedyRun,
}

/// Runs the greedy sign choice for `n = 1..=n_max`. `tau` is a rational
/// literal or one of `pi`, `e`, `sqrt2`, `log2`, `euler_gamma`.
/// `precision_bits = 0` escalates from 256 bits as needed.
///
/// # Safety
/// `tau` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sh_greedy_run(
    tau: *const c_char,
    n_max: u64,
    precision_bits: u32,
    out: *mut *mut ShGreedyRun,
) -> ShStatus {
    guard(|| {
        check_out(out)?;
        let tau: GreedyTarget = lib(read_str(tau, "tau")?.parse())?;
        let inner = if precision_bits == 0 {
            lib(greedy::greedy_run_auto(&tau, n_max, greedy::DEFAULT_GREEDY_PRECISION))?
        } else {
            lib(greedy::greedy_run(&tau, n_max, precision_bits as usize))?
        };
        *out = Box::into_raw(Box::new(ShGreedyRun { inner }));
        Ok(())
    })
}

/// # Safety
/// `r` must be a live handle from [`sh_greedy_run`].
#[no_mangle]
pub unsafe extern "C" fn sh_greedy_len(r: *const ShGreedyRun) -> u64 {
    r.as_ref().map_or(0, |r| r.inner.n_max)
}

/// Sign chosen at step `n` (1-based): `1`, `-1`, or `0` when out of range.
///
/// # Safety
/// `r` must be a live handle from [`sh_greedy_run`].
#[no_mangle]
pub unsafe extern "C" fn sh_greedy_sign(r: *const ShGreedyRun, n: u64) -> i8 {
    match r.as_ref() {
        Some(r) if n >= 1 && n <= r.inner.n_max => r.inner.signs.entries()[(n - 1) as usize],
        _ => 0,
    }
}

/// `|sigma_n - tau|` after step `n` (1-based).
///
/// # Safety
/// `r` must be a live handle from [`sh_greedy_run`] and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_greedy_residual(r: *const ShGreedyRun, n: u64, out: *mut f64) -> ShStatus {
    guard(|| {
        check_out(out)?;
        let r = r.as_ref().ok_or((ShStatus::NullPointer, "run is null".to_string()))?;
        if n == 0 || n > r.inner.n_max {
            return Err((ShStatus::Domain, format!("n = {n} outside 1..={}", r.inner.n_max)));
        }
        *out = r.inner.residual(n);
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from [`sh_greedy_run`] that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sh_greedy_free(r: *mut ShGreedyRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Limit density `g(x)`; `tol <= 0` selects the default tolerance.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_g_density(x: f64, tol: f64, out: *mut f64) -> ShStatus {
    guard(|| {
        check_out(out)?;
        let mut spec = QuadratureSpec::default();
        if tol > 0.0 {
            spec = spec.with_tol(tol);
        }
        *out = lib(density::g_density(x, &spec))?;
        Ok(())
    })
}

/// `prod_{n <= N} cos(pi x / n)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_rho_n(x: f64, n: u64, out: *mut f64) -> ShStatus {
    guard(|| {
        check_out(out)?;
        *out = lib(density::rho_n(x, n))?;
        Ok(())
    })
}

/// Exact `P[a < X_N < b]` for uniform random signs.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_prob_exact(n: u32, a: f64, b: f64, out: *mut f64) -> ShStatus {
    guard(|| {
        check_out(out)?;
        let est = lib(density::distribution_probability(&DistributionQuery::exact(n, a, b)))?;
        *out = est.probability;
        Ok(())
    })
}

/// Number of distinct values in the 6-tuple family.
#[no_mangle]
pub extern "C" fn sh_tuple_value_count() -> u64 {
    bounds_lab::tuple_value_count()
}
