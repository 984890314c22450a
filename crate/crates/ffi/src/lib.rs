//! C ABI over the seven-inv engine.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `*_free`. Strings returned through out-parameters are
//! heap-allocated and released with [`seven_inv_string_free`]. Every entry
//! point returns a [`SevenInvStatus`]; on failure the message is available
//! from [`seven_inv_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use seven_inv::defect::{defect_d_exact, defect_d_float, DefectArgs};
use seven_inv::invariants::{invariant_report, validate_pair, InvariantReport, ParamPair, Triple};
use seven_inv::oracle::oracle_check;
use seven_inv::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SevenInvStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidPair = 2,
    InfiniteH4 = 3,
    InvalidArgument = 4,
    Internal = 5,
    Panic = 6,
}

/// A validated parameter pair.
pub struct SevenInvPair(ParamPair);

/// A computed invariant report.
pub struct SevenInvReport(InvariantReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> SevenInvStatus {
    match e {
        Error::InvalidPair(_) => SevenInvStatus::InvalidPair,
        Error::InfiniteH4 => SevenInvStatus::InfiniteH4,
        _ if e.exit_code() == 2 => SevenInvStatus::InvalidArgument,
        _ => SevenInvStatus::Internal,
    }
}

enum Failure {
    Null(&'static str),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SevenInvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SevenInvStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null argument: {what}"));
            SevenInvStatus::NullArgument
        }
        Ok(Err(Failure::Engine(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            SevenInvStatus::Panic
        }
    }
}

unsafe fn read3(p: *const i64, what: &'static str) -> Result<[i64; 3], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok([s[0], s[1], s[2]])
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(v);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw()
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// call into this library from the same thread.
#[no_mangle]
pub extern "C" fn seven_inv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn seven_inv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Validates (a, b); `a` and `b` point to three integers each.
///
/// # Safety
/// `a`, `b` must point to 3 readable `int64_t`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_pair_new(
    a: *const i64,
    b: *const i64,
    out: *mut *mut SevenInvPair,
) -> SevenInvStatus {
    guard(|| {
        let (a, b) = (read3(a, "a")?, read3(b, "b")?);
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let pair = validate_pair(Triple::from(a), Triple::from(b))?;
        put(out, Box::into_raw(Box::new(SevenInvPair(pair))), "out")
    })
}

/// # Safety
/// `pair` must be NULL or a handle from [`seven_inv_pair_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_pair_free(pair: *mut SevenInvPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_report_new(
    pair: *const SevenInvPair,
    out: *mut *mut SevenInvReport,
) -> SevenInvStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let rep = invariant_report(&pair.0)?;
        put(out, Box::into_raw(Box::new(SevenInvReport(rep))), "out")
    })
}

/// # Safety
/// `report` must be NULL or a handle from [`seven_inv_report_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_report_free(report: *mut SevenInvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// The report as a JSON object.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_report_json(report: *const SevenInvReport, out: *mut *mut c_char) -> SevenInvStatus {
    guard(|| {
        let rep = deref(report, "report")?;
        let json = serde_json::to_string(&rep.0).map_err(|e| Error::Internal(e.to_string()))?;
        put(out, c_string(json), "out")
    })
}

/// One field as text: "n", "m", "s", "mu", "lk", "p1", "defect_minus",
/// "defect_plus". Rationals print as "p/q" or "p".
///
/// # Safety
/// `report` must be a live handle, `field` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_report_field(
    report: *const SevenInvReport,
    field: *const c_char,
    out: *mut *mut c_char,
) -> SevenInvStatus {
    guard(|| {
        let rep = &deref(report, "report")?.0;
        if field.is_null() {
            return Err(Failure::Null("field"));
        }
        let name = CStr::from_ptr(field).to_str().map_err(|e| Error::Precondition(e.to_string()))?;
        let text = match name {
            "n" => rep.n.to_string(),
            "m" => rep.m.to_string(),
            "s" => rep.s.to_string(),
            "mu" => rep.mu.to_string(),
            "lk" => rep.lk.to_string(),
            "p1" => rep.p1.as_ref().map_or_else(|| "unavailable".into(), |p| p.to_string()),
            "defect_minus" => rep.defect_minus.to_string(),
            "defect_plus" => rep.defect_plus.to_string(),
            other => return Err(Error::Precondition(format!("unknown field {other:?}")).into()),
        };
        put(out, c_string(text), "out")
    })
}

/// Exact D(q; p1, p2, p3) as "p/q" text.
///
/// # Safety
/// `p` must point to 3 readable `int64_t`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_defect_exact(q: i64, p: *const i64, out: *mut *mut c_char) -> SevenInvStatus {
    guard(|| {
        let args = DefectArgs::new(q, read3(p, "p")?)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        put(out, c_string(defect_d_exact(&args)?.to_string()), "out")
    })
}

/// D(q; p1, p2, p3) in double precision.
///
/// # Safety
/// `p` must point to 3 readable `int64_t`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_defect_float(q: i64, p: *const i64, out: *mut f64) -> SevenInvStatus {
    guard(|| {
        let args = DefectArgs::new(q, read3(p, "p")?)?;
        put(out, defect_d_float(&args), "out")
    })
}

/// Runs the strata oracle; `equal` receives 1 when it matches the closed form.
/// `json` may be NULL; otherwise it receives the full report.
///
/// # Safety
/// `pair` must be a live handle; `equal` writable; `json` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn seven_inv_oracle_check(
    pair: *const SevenInvPair,
    equal: *mut i32,
    json: *mut *mut c_char,
) -> SevenInvStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        if equal.is_null() {
            return Err(Failure::Null("equal"));
        }
        let rep = oracle_check(&pair.0)?;
        if !json.is_null() {
            let s = serde_json::to_string(&rep).map_err(|e| Error::Internal(e.to_string()))?;
            json.write(c_string(s));
        }
        put(equal, rep.equal as i32, "equal")
    })
}
