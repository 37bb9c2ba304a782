//! C ABI for the renormalization laboratory.
//!
//! Maps and pairs are opaque heap handles created by `rl_*_new`/`rl_*_extract`
//! style functions and released with the matching `*_free` function. Every
//! fallible call returns an [`RlStatus`]; on failure the message is available
//! from [`rl_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use renorm_lab::circle_map::{closest_returns, CircleMapLift, FamilySpec, DEFAULT_MAX_ITERATIONS};
use renorm_lab::commuting_pair::{distance, extract_pair, pair_to_json, CommutingPair, MetricVariant, Period};
use renorm_lab::experiments::{solve_map, ExperimentConfig};
use renorm_lab::numerics::{Scalar, TargetDigits};
use renorm_lab::LabError;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Invalid configuration, text or argument.
    InvalidArgument = 2,
    /// Solver, period or precision failure.
    SolverFailure = 3,
    /// A pair failed validation.
    InvariantViolation = 4,
    /// A caller-provided buffer is too small.
    BufferTooSmall = 5,
    /// An internal panic was caught.
    Panic = 6,
}

/// Opaque handle to a circle map with its closest-returns record.
pub struct RlMap {
    map: CircleMapLift,
    cf: renorm_lab::numerics::ContinuedFractionState,
}

/// Opaque handle to a commuting pair.
pub struct RlPair {
    pair: CommutingPair,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &LabError) -> RlStatus {
    match e.exit_code() {
        2 => RlStatus::InvalidArgument,
        3 => RlStatus::SolverFailure,
        _ => RlStatus::InvariantViolation,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (RlStatus, String)>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RlStatus::Panic
        }
    }
}

fn lab<T>(r: renorm_lab::Result<T>) -> Result<T, (RlStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (RlStatus, String) {
    (RlStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, (RlStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| (RlStatus::InvalidArgument, "argument is not UTF-8".into()))
}

unsafe fn digits<'a>(p: *const u64, len: usize) -> Result<&'a [u64], (RlStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn family(spec_json: &str) -> Result<FamilySpec, (RlStatus, String)> {
    serde_json::from_str(spec_json).map_err(|e| (RlStatus::InvalidArgument, format!("invalid family spec: {e}")))
}

/// Message of the last failure on this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn rl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a map from a JSON family spec such as `{"id":"arnold","params":{"d":1}}`
/// and a parameter `omega` given as decimal or `p/q` text, and records `max_level`
/// continued-fraction digits of its rotation number.
///
/// # Safety
/// `spec_json` and `omega` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_new(
    spec_json: *const c_char,
    omega: *const c_char,
    precision: u32,
    max_level: u32,
    out: *mut *mut RlMap,
) -> RlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let spec = family(text(spec_json)?)?;
        let fam = lab(spec.build(precision))?;
        let w = lab(Scalar::parse(text(omega)?, precision))?;
        let map = CircleMapLift::new(Arc::clone(&fam), w);
        let cf = lab(closest_returns(&map, max_level as usize, DEFAULT_MAX_ITERATIONS))?;
        *out = Box::into_raw(Box::new(RlMap { map, cf }));
        Ok(())
    })
}

/// Solves the family for the rotation number `[prefix, tail, tail, ...]` to `depth` digits.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string, `prefix`/`tail` must point to
/// `prefix_len`/`tail_len` integers (or be null when the length is 0), and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_solve(
    spec_json: *const c_char,
    prefix: *const u64,
    prefix_len: usize,
    tail: *const u64,
    tail_len: usize,
    depth: u32,
    precision: u32,
    out: *mut *mut RlMap,
) -> RlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let spec = family(text(spec_json)?)?;
        let target = TargetDigits::new(digits(prefix, prefix_len)?.to_vec(), digits(tail, tail_len)?.to_vec());
        lab(target.validate())?;
        let cfg = ExperimentConfig { precision_bits: precision, ..ExperimentConfig::default() };
        let sm = lab(solve_map(&spec, &target, depth as usize, &cfg))?;
        *out = Box::into_raw(Box::new(RlMap { map: sm.map, cf: sm.solve.cf }));
        Ok(())
    })
}

/// Releases a map handle; null is ignored.
///
/// # Safety
/// `map` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_map_free(map: *mut RlMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Copies the recorded digits into `buf` (capacity `cap`) and stores their count in `len`.
///
/// # Safety
/// `map` must be a live handle, `buf` must hold `cap` integers and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_digits(map: *const RlMap, buf: *mut u64, cap: usize, len: *mut usize) -> RlStatus {
    guard(|| {
        let m = map.as_ref().ok_or_else(null)?;
        if len.is_null() {
            return Err(null());
        }
        let d = &m.cf.digits;
        *len = d.len();
        if d.len() > cap {
            return Err((RlStatus::BufferTooSmall, format!("{} digits do not fit in {cap}", d.len())));
        }
        if !d.is_empty() {
            if buf.is_null() {
                return Err(null());
            }
            std::ptr::copy_nonoverlapping(d.as_ptr(), buf, d.len());
        }
        Ok(())
    })
}

/// The map parameter as a newly allocated decimal string; release with [`rl_string_free`].
///
/// # Safety
/// `map` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_map_omega(map: *const RlMap) -> *mut c_char {
    match map.as_ref() {
        Some(m) => CString::new(m.map.omega().to_decimal_string()).map(CString::into_raw).unwrap_or(std::ptr::null_mut()),
        None => {
            set_error("null pointer argument");
            std::ptr::null_mut()
        }
    }
}

/// Extracts the commuting pair of `level`.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_pair_extract(map: *const RlMap, level: u32, out: *mut *mut RlPair) -> RlStatus {
    guard(|| {
        let m = map.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let pair = lab(extract_pair(&m.map, &m.cf, level as usize))?;
        *out = Box::into_raw(Box::new(RlPair { pair }));
        Ok(())
    })
}

/// Releases a pair handle; null is ignored.
///
/// # Safety
/// `pair` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_pair_free(pair: *mut RlPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Period of the pair; `u64::MAX` stands for an infinite period.
///
/// # Safety
/// `pair` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_pair_period(pair: *const RlPair, out: *mut u64) -> RlStatus {
    guard(|| {
        let p = pair.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = match lab(p.pair.period())? {
            Period::Finite(a) => a,
            Period::Infinite => u64::MAX,
        };
        Ok(())
    })
}

/// Renormalization (pre-renormalization followed by normalization) of a pair.
///
/// # Safety
/// `pair` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_pair_renormalize(pair: *const RlPair, out: *mut *mut RlPair) -> RlStatus {
    guard(|| {
        let p = pair.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let r = lab(p.pair.renormalize())?;
        *out = Box::into_raw(Box::new(RlPair { pair: r }));
        Ok(())
    })
}

/// Normalization of a pair (`η(0) = −1`).
///
/// # Safety
/// `pair` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_pair_normalize(pair: *const RlPair, out: *mut *mut RlPair) -> RlStatus {
    guard(|| {
        let p = pair.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = Box::into_raw(Box::new(RlPair { pair: p.pair.normalize() }));
        Ok(())
    })
}

/// Möbius-framed `C^r` distance (`r` in 0..=2) on `grid` points per side, as a double.
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_pair_distance(
    a: *const RlPair,
    b: *const RlPair,
    r: u32,
    grid: u32,
    out: *mut f64,
) -> RlStatus {
    guard(|| {
        let (pa, pb) = (a.as_ref().ok_or_else(null)?, b.as_ref().ok_or_else(null)?);
        if out.is_null() {
            return Err(null());
        }
        if r > 2 {
            return Err((RlStatus::InvalidArgument, format!("r must be 0, 1 or 2, got {r}")));
        }
        let rep = lab(distance(&pa.pair, &pb.pair, MetricVariant::Moebius, grid as usize))?;
        *out = rep.d(r as usize).to_f64();
        Ok(())
    })
}

/// Serialized pair record as a newly allocated JSON string; release with [`rl_string_free`].
///
/// # Safety
/// `pair` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_pair_to_json(pair: *const RlPair) -> *mut c_char {
    let Some(p) = pair.as_ref() else {
        set_error("null pointer argument");
        return std::ptr::null_mut();
    };
    match pair_to_json(&p.pair) {
        Ok(s) => CString::new(s).map(CString::into_raw).unwrap_or(std::ptr::null_mut()),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
