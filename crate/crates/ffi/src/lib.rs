//! C ABI over orbinv-core.
//!
//! Objects cross the boundary as opaque handles released by their `_free`
//! function. Every fallible call returns an `OrbinvStatus`; on failure the
//! message is kept per thread and read with `orbinv_last_error`. Reports are
//! returned as NUL-terminated JSON owned by the caller and released with
//! `orbinv_string_free`. Panics never unwind into C.

use orbinv_core::invariants::{elliptic_invariants, quasi_regular_invariants, Settings};
use orbinv_core::linalg::Mat;
use orbinv_core::mass::mass_sums;
use orbinv_core::matrix::classify;
use orbinv_core::{Error, FiniteField, SeriesPoly};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbinvStatus {
    Ok = 0,
    /// a required pointer argument was null
    NullArgument = 1,
    /// a string argument was not UTF-8
    InvalidUtf8 = 2,
    /// malformed input: parse errors, bad shapes, violated preconditions
    InvalidInput = 3,
    /// the working precision could not certify the answer
    Precision = 4,
    /// an enumeration or iteration budget ran out
    Budget = 5,
    /// an identity that must hold was violated
    Violation = 6,
    /// a panic was caught at the boundary
    Internal = 7,
}

/// F_q.
pub struct OrbinvField(Arc<FiniteField>);
/// A polynomial over F_q((T)).
pub struct OrbinvPoly(SeriesPoly);
/// A square matrix over F_q((T)).
pub struct OrbinvMatrix(Mat);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> OrbinvStatus {
    match e {
        Error::RelationViolated(_) | Error::InconsistentMinimality(_) => OrbinvStatus::Violation,
        Error::BudgetExceeded(_) | Error::CapExceeded(_) => OrbinvStatus::Budget,
        e if e.is_precision_like() => OrbinvStatus::Precision,
        Error::NormalizationFailed(_) => OrbinvStatus::Precision,
        _ => OrbinvStatus::InvalidInput,
    }
}

/// Run `body`, record any error, and convert panics to `Internal`.
fn guard(body: impl FnOnce() -> Result<(), (OrbinvStatus, String)>) -> OrbinvStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OrbinvStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OrbinvStatus::Internal
        }
    }
}

fn lib<T>(r: orbinv_core::Result<T>) -> Result<T, (OrbinvStatus, String)> {
    r.map_err(|e| (status_of(&e), format!("{}: {e}", e.kind())))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, (OrbinvStatus, String)> {
    if p.is_null() {
        return Err((OrbinvStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (OrbinvStatus::InvalidUtf8, "string argument is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (OrbinvStatus, String)> {
    p.as_ref().ok_or((OrbinvStatus::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), (OrbinvStatus, String)> {
    if out.is_null() {
        return Err((OrbinvStatus::NullArgument, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (OrbinvStatus, String)> {
    if out.is_null() {
        return Err((OrbinvStatus::NullArgument, "null output pointer".into()));
    }
    let c = CString::new(s).map_err(|_| (OrbinvStatus::Internal, "report contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, (OrbinvStatus, String)> {
    serde_json::to_string(v).map_err(|e| (OrbinvStatus::Internal, e.to_string()))
}

fn settings(work: i64) -> Result<Settings, (OrbinvStatus, String)> {
    if work <= 0 {
        return Err((OrbinvStatus::InvalidInput, "work must be positive".into()));
    }
    Ok(Settings { work, max_work: (8 * work).max(Settings::default().max_work), window: None })
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn orbinv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn orbinv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn orbinv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// F_q with the standard (Conway) model.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orbinv_field_new(q: u32, out: *mut *mut OrbinvField) -> OrbinvStatus {
    guard(|| put(out, OrbinvField(lib(FiniteField::from_order(q))?)))
}

/// # Safety
/// `f` must come from `orbinv_field_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn orbinv_field_free(f: *mut OrbinvField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Parse a polynomial such as "x^2 - T".
///
/// # Safety
/// Pointers must be valid; `text` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn orbinv_poly_parse(
    field: *const OrbinvField,
    text_in: *const c_char,
    out: *mut *mut OrbinvPoly,
) -> OrbinvStatus {
    guard(|| {
        let f = handle(field)?;
        let p = lib(SeriesPoly::parse(&f.0, text(text_in)?))?;
        put(out, OrbinvPoly(p))
    })
}

/// # Safety
/// `p` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn orbinv_poly_free(p: *mut OrbinvPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Printed form of a polynomial; parses back to an equal value.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn orbinv_poly_to_string(p: *const OrbinvPoly, out: *mut *mut c_char) -> OrbinvStatus {
    guard(|| put_string(out, handle(p)?.0.to_text()))
}

/// Parse a matrix given as JSON rows of series, e.g. [["0","T"],["1","0"]].
///
/// # Safety
/// Pointers must be valid; `json_rows` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn orbinv_matrix_parse_json(
    field: *const OrbinvField,
    json_rows: *const c_char,
    out: *mut *mut OrbinvMatrix,
) -> OrbinvStatus {
    guard(|| {
        let f = handle(field)?;
        let rows: Vec<Vec<String>> = serde_json::from_str(text(json_rows)?)
            .map_err(|e| (OrbinvStatus::InvalidInput, format!("matrix JSON: {e}")))?;
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
            return Err((OrbinvStatus::InvalidInput, "matrix must be square and nonempty".into()));
        }
        put(out, OrbinvMatrix(lib(Mat::parse(&f.0, &rows))?))
    })
}

/// Companion matrix of a monic polynomial.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn orbinv_matrix_companion(p: *const OrbinvPoly, out: *mut *mut OrbinvMatrix) -> OrbinvStatus {
    guard(|| put(out, OrbinvMatrix(lib(Mat::companion(&handle(p)?.0))?)))
}

/// # Safety
/// `m` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn orbinv_matrix_free(m: *mut OrbinvMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Matrix entries as JSON rows.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn orbinv_matrix_to_json(m: *const OrbinvMatrix, out: *mut *mut c_char) -> OrbinvStatus {
    guard(|| put_string(out, json(&handle(m)?.0.to_texts())?))
}

/// Characteristic polynomial as a new handle.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn orbinv_matrix_char_poly(m: *const OrbinvMatrix, out: *mut *mut OrbinvPoly) -> OrbinvStatus {
    guard(|| put(out, OrbinvPoly(handle(m)?.0.char_poly())))
}

/// Classification report as JSON.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn orbinv_classify_json(
    m: *const OrbinvMatrix,
    work: i64,
    out: *mut *mut c_char,
) -> OrbinvStatus {
    guard(|| {
        let s = settings(work)?;
        put_string(out, json(&lib(classify(&handle(m)?.0, s.work))?)?)
    })
}

/// Invariants of the element with characteristic polynomial `chi`:
/// elliptic invariants when χ is irreducible, block invariants when it is
/// squarefree.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn orbinv_invariants_json(
    chi: *const OrbinvPoly,
    work: i64,
    out: *mut *mut c_char,
) -> OrbinvStatus {
    guard(|| {
        let s = settings(work)?;
        let chi = &handle(chi)?.0;
        let irreducible = lib(orbinv_core::factor::is_irreducible(chi, s.work))?;
        let report = if irreducible {
            json(&lib(elliptic_invariants(chi, &s))?)?
        } else {
            json(&lib(quasi_regular_invariants(chi, &s))?)?
        };
        put_string(out, report)
    })
}

/// Mass-formula report for degree n over F_q at precision M; `dmax < 0`
/// selects the default M − 2.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn orbinv_mass_formula_json(
    q: u32,
    n: u32,
    precision: i64,
    dmax: i64,
    node_budget: u64,
    out: *mut *mut c_char,
) -> OrbinvStatus {
    guard(|| {
        let d = (dmax >= 0).then_some(dmax);
        let m = lib(mass_sums(q, n as usize, precision, d, node_budget as usize))?;
        put_string(out, json(&m)?)
    })
}

/// Run one command-line invocation given as a JSON array of arguments
/// (without the program name). The report is returned even when the
/// command fails; `exit_code` receives the command-line exit status.
///
/// # Safety
/// Pointers must be valid; `args_json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn orbinv_command_json(
    args_json: *const c_char,
    exit_code: *mut i32,
    out: *mut *mut c_char,
) -> OrbinvStatus {
    guard(|| {
        let args: Vec<String> = serde_json::from_str(text(args_json)?)
            .map_err(|e| (OrbinvStatus::InvalidInput, format!("arguments must be a JSON string array: {e}")))?;
        if exit_code.is_null() {
            return Err((OrbinvStatus::NullArgument, "null exit code pointer".into()));
        }
        let argv = std::iter::once("orbinv".to_string()).chain(args);
        let o = orbinv_core::cli::main_with_args(argv);
        *exit_code = o.code as i32;
        let body = if o.stdout.is_empty() { o.stderr } else { o.stdout };
        put_string(out, body)
    })
}
