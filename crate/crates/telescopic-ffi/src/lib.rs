//! C interface over the telescopic linkage library.
//!
//! Conventions: every fallible function returns a [`TlStatus`] and writes
//! its result through out-pointers; a non-zero status leaves the
//! out-pointers untouched and stores a message retrievable with
//! [`tl_last_error_message`] until the next fallible call on the same
//! thread. Strings returned through out-pointers are NUL-terminated,
//! heap-allocated copies released with [`tl_string_free`]. Handles are
//! released with their matching `_free` function; passing NULL to a
//! `_free` is a no-op. Panics are caught at the boundary and reported as
//! [`TlStatus::Panic`].
//!
//! The safety contract is uniform: pointer arguments must be NULL or
//! valid for the advertised type, string arguments must be
//! NUL-terminated, and handles must not be used after their `_free`.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::{c_char, c_double, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use telescopic::oracle::{grid_b0, GridConfig};
use telescopic::xy::{tau_analytic, tau_empirical, total_betti_xy, v_interval, BettiMode, XYParams};
use telescopic::{
    is_disconnected, parse_rational, profile_with_engine, BettiProfile, Engine, Error,
    LengthVector,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidString = 2,
    /// A string argument did not parse.
    Parse = 3,
    /// Arguments were outside the admissible domain.
    Domain = 4,
    /// The request exceeded a capacity guard of the chosen engine.
    Capacity = 5,
    /// The grid oracle did not stabilize at the requested resolutions.
    Inconclusive = 6,
    /// An internal panic was caught at the boundary.
    Panic = 7,
}

/// Opaque handle over a validated vector of leg lengths.
pub struct TlLengthVector(LengthVector);

/// Opaque handle over a computed profile of Betti numbers.
pub struct TlBettiProfile(BettiProfile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn remember_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(sanitized).ok());
}

fn status_of(err: &Error) -> TlStatus {
    match err {
        Error::Parse { .. } => TlStatus::Parse,
        Error::EnumerationCap { .. } | Error::Capacity(_) => TlStatus::Capacity,
        Error::Inconclusive { .. } => TlStatus::Inconclusive,
        _ => TlStatus::Domain,
    }
}

fn guarded<F>(body: F) -> TlStatus
where
    F: FnOnce() -> telescopic::Result<()>,
{
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TlStatus::Ok,
        Ok(Err(err)) => {
            let status = status_of(&err);
            remember_error(&err.to_string());
            status
        }
        Err(_) => {
            remember_error("internal panic");
            TlStatus::Panic
        }
    }
}

fn null_pointer() -> TlStatus {
    remember_error("null pointer argument");
    TlStatus::NullPointer
}

fn export_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, TlStatus> {
    match CStr::from_ptr(ptr).to_str() {
        Ok(text) => Ok(text),
        Err(_) => {
            remember_error("string argument is not valid UTF-8");
            Err(TlStatus::InvalidString)
        }
    }
}

/// Returns a copy of the message stored by the most recent failed call on
/// this thread, or NULL when the most recent call succeeded. The caller
/// releases the copy with tl_string_free.
#[no_mangle]
pub extern "C" fn tl_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => export_string(message.to_string_lossy().into_owned()),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a comma-separated list of leg lengths (rationals like `5/4` or
/// square roots like `sqrt(2)`, telescopic leg last) into a handle.
#[no_mangle]
pub unsafe extern "C" fn tl_length_vector_parse(
    spec: *const c_char,
    out: *mut *mut TlLengthVector,
) -> TlStatus {
    if spec.is_null() || out.is_null() {
        return null_pointer();
    }
    let text = match read_str(spec) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| {
        let lv = LengthVector::parse(text)?;
        *out = Box::into_raw(Box::new(TlLengthVector(lv)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tl_length_vector_free(lv: *mut TlLengthVector) {
    if !lv.is_null() {
        drop(Box::from_raw(lv));
    }
}

/// Number of legs, telescopic included.
#[no_mangle]
pub unsafe extern "C" fn tl_length_vector_n(
    lv: *const TlLengthVector,
    out: *mut usize,
) -> TlStatus {
    if lv.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        *out = (*lv).0.n();
        Ok(())
    })
}

/// Writes 1 when the configuration space has two connected components,
/// 0 when it has one. Fails for n = 3 and for non-generic vectors.
#[no_mangle]
pub unsafe extern "C" fn tl_length_vector_disconnected(
    lv: *const TlLengthVector,
    out: *mut c_int,
) -> TlStatus {
    if lv.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        *out = is_disconnected(&(*lv).0)? as c_int;
        Ok(())
    })
}

/// Computes the full profile of Betti numbers for the handle.
#[no_mangle]
pub unsafe extern "C" fn tl_betti_compute(
    lv: *const TlLengthVector,
    out: *mut *mut TlBettiProfile,
) -> TlStatus {
    if lv.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        let profile = profile_with_engine(&(*lv).0, Engine::Auto)?;
        *out = Box::into_raw(Box::new(TlBettiProfile(profile)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tl_betti_free(profile: *mut TlBettiProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Dimension n - 3 of the configuration space.
#[no_mangle]
pub unsafe extern "C" fn tl_betti_dimension(
    profile: *const TlBettiProfile,
    out: *mut usize,
) -> TlStatus {
    if profile.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        *out = (*profile).0.dimension;
        Ok(())
    })
}

/// Number of stored ranks b_0 .. b_{count-1}.
#[no_mangle]
pub unsafe extern "C" fn tl_betti_rank_count(
    profile: *const TlBettiProfile,
    out: *mut usize,
) -> TlStatus {
    if profile.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        *out = (*profile).0.b.len();
        Ok(())
    })
}

/// Writes 1 when no subset of the legs sums to half the perimeter.
#[no_mangle]
pub unsafe extern "C" fn tl_betti_generic(
    profile: *const TlBettiProfile,
    out: *mut c_int,
) -> TlStatus {
    if profile.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        *out = (*profile).0.generic as c_int;
        Ok(())
    })
}

/// Betti number b_k as a decimal string.
#[no_mangle]
pub unsafe extern "C" fn tl_betti_rank_decimal(
    profile: *const TlBettiProfile,
    k: usize,
    out: *mut *mut c_char,
) -> TlStatus {
    if profile.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        let ranks = &(*profile).0.b;
        let value = ranks.get(k).ok_or_else(|| Error::OutOfRange {
            param: "k",
            value: k.to_string(),
            range: format!("0..={}", ranks.len().saturating_sub(1)),
        })?;
        *out = export_string(value.to_string());
        Ok(())
    })
}

/// Sum of all Betti numbers as a decimal string.
#[no_mangle]
pub unsafe extern "C" fn tl_betti_total_decimal(
    profile: *const TlBettiProfile,
    out: *mut *mut c_char,
) -> TlStatus {
    if profile.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        *out = export_string((*profile).0.total.to_string());
        Ok(())
    })
}

/// Euler characteristic as a decimal string (possibly negative).
#[no_mangle]
pub unsafe extern "C" fn tl_betti_euler_decimal(
    profile: *const TlBettiProfile,
    out: *mut *mut c_char,
) -> TlStatus {
    if profile.is_null() || out.is_null() {
        return null_pointer();
    }
    guarded(|| {
        *out = export_string((*profile).0.euler.to_string());
        Ok(())
    })
}

/// Counts connected components by flood-filling a grid on the torus of
/// diagonal angles. Zero resolution or rounds select the defaults (48,
/// 1); a non-positive margin threshold selects the resolution-dependent
/// default.
#[no_mangle]
pub unsafe extern "C" fn tl_grid_b0(
    lv: *const TlLengthVector,
    resolution: usize,
    rounds: usize,
    margin_threshold: c_double,
    out_components: *mut usize,
) -> TlStatus {
    if lv.is_null() || out_components.is_null() {
        return null_pointer();
    }
    guarded(|| {
        let mut cfg = GridConfig::default();
        if resolution > 0 {
            cfg.resolution = resolution;
        }
        if rounds > 0 {
            cfg.rounds = rounds;
        }
        if margin_threshold > 0.0 {
            cfg.margin_threshold = Some(margin_threshold);
        }
        *out_components = grid_b0(&(*lv).0, &cfg)?.components;
        Ok(())
    })
}

/// Admissible energy interval [lo, hi] for field strength h, written as
/// two rational strings.
#[no_mangle]
pub unsafe extern "C" fn tl_xy_v_interval(
    h: *const c_char,
    out_lo: *mut *mut c_char,
    out_hi: *mut *mut c_char,
) -> TlStatus {
    if h.is_null() || out_lo.is_null() || out_hi.is_null() {
        return null_pointer();
    }
    let h_text = match read_str(h) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| {
        let (lo, hi) = v_interval(&parse_rational(h_text)?)?;
        *out_lo = export_string(lo.to_string());
        *out_hi = export_string(hi.to_string());
        Ok(())
    })
}

unsafe fn xy_params(
    rotators: usize,
    h: *const c_char,
    v: *const c_char,
) -> Result<XYParams, TlStatus> {
    let h_text = read_str(h)?;
    let v_text = read_str(v)?;
    let build = || -> telescopic::Result<XYParams> {
        XYParams::new(rotators, parse_rational(h_text)?, parse_rational(v_text)?)
    };
    build().map_err(|err| {
        let status = status_of(&err);
        remember_error(&err.to_string());
        status
    })
}

/// Analytic growth rate of the total Betti number at energy v: the
/// entropy H(p_v) below the transition, ln 2 at and above it.
#[no_mangle]
pub unsafe extern "C" fn tl_xy_tau_analytic(
    h: *const c_char,
    v: *const c_char,
    out: *mut c_double,
) -> TlStatus {
    if h.is_null() || v.is_null() || out.is_null() {
        return null_pointer();
    }
    let h_text = match read_str(h) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let v_text = match read_str(v) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| {
        *out = tau_analytic(&parse_rational(h_text)?, &parse_rational(v_text)?)?;
        Ok(())
    })
}

/// Finite-size growth rate ln(b) / (N + 2) for N rotators at field h and
/// energy v. Non-zero log_space sums binomial prefixes in log space
/// instead of exact big integers.
#[no_mangle]
pub unsafe extern "C" fn tl_xy_tau_empirical(
    rotators: usize,
    h: *const c_char,
    v: *const c_char,
    log_space: c_int,
    out: *mut c_double,
) -> TlStatus {
    if h.is_null() || v.is_null() || out.is_null() {
        return null_pointer();
    }
    let params = match xy_params(rotators, h, v) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let mode = if log_space != 0 {
        BettiMode::LogSpace
    } else {
        BettiMode::Exact
    };
    guarded(|| {
        *out = tau_empirical(&params, mode)?;
        Ok(())
    })
}

/// Total Betti number as an exact decimal string.
#[no_mangle]
pub unsafe extern "C" fn tl_xy_total_betti_decimal(
    rotators: usize,
    h: *const c_char,
    v: *const c_char,
    out: *mut *mut c_char,
) -> TlStatus {
    if h.is_null() || v.is_null() || out.is_null() {
        return null_pointer();
    }
    let params = match xy_params(rotators, h, v) {
        Ok(p) => p,
        Err(status) => return status,
    };
    guarded(|| {
        let total = total_betti_xy(&params, BettiMode::Exact)?;
        *out = export_string(total.exact.expect("exact mode").to_string());
        Ok(())
    })
}

/// Natural logarithm of the total Betti number, computed in log space.
#[no_mangle]
pub unsafe extern "C" fn tl_xy_total_betti_ln(
    rotators: usize,
    h: *const c_char,
    v: *const c_char,
    out: *mut c_double,
) -> TlStatus {
    if h.is_null() || v.is_null() || out.is_null() {
        return null_pointer();
    }
    let params = match xy_params(rotators, h, v) {
        Ok(p) => p,
        Err(status) => return status,
    };
    guarded(|| {
        *out = total_betti_xy(&params, BettiMode::LogSpace)?.ln;
        Ok(())
    })
}
