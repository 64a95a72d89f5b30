//! C ABI over `gl2lab`.
//!
//! Matrices and subgroups are opaque heap handles released with their
//! `*_free` function. Every fallible call returns a [`Gl2Status`]; on a
//! non-zero status, [`gl2lab_last_error`] gives a message for the calling
//! thread. Strings returned through `out` parameters are owned by the caller
//! and released with [`gl2lab_string_free`]. Reports are the JSON documents
//! the CLI prints.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gl2lab::budget::Budget;
use gl2lab::cache::Cache;
use gl2lab::classify::Classifier;
use gl2lab::conjugacy::conjugate_contains;
use gl2lab::inertia::LemmaCase;
use gl2lab::mat2::parse_mat2;
use gl2lab::scan::{scan_with, ScanMode, ScanParams};
use gl2lab::standard::{named, Family};
use gl2lab::{verify, Error, Mat2, Subgroup};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gl2Status {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Malformed text (matrix encoding, family or check name, UTF-8).
    Parse = 2,
    /// Out-of-range or inconsistent argument (modulus, prime, exponent, ...).
    InvalidArgument = 3,
    /// A singular matrix where a unit is required.
    NotInvertible = 4,
    /// The request exceeds the configured size budget.
    BudgetExceeded = 5,
    /// Operands live over different moduli.
    ModulusMismatch = 6,
    /// Filesystem or serialization failure.
    Io = 7,
    /// A panic was caught at the boundary.
    Internal = 8,
}

/// Opaque matrix handle.
pub struct Gl2Mat2(Mat2);

/// Opaque subgroup handle.
pub struct Gl2Subgroup(Subgroup);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> Gl2Status {
    match e {
        Error::Parse { .. } => Gl2Status::Parse,
        Error::NotInvertible(_) => Gl2Status::NotInvertible,
        Error::BudgetExceeded { .. } => Gl2Status::BudgetExceeded,
        Error::ModulusMismatch { .. } => Gl2Status::ModulusMismatch,
        Error::Io(_) | Error::Json(_) | Error::CacheCorrupt { .. } => Gl2Status::Io,
        _ => Gl2Status::InvalidArgument,
    }
}

struct Fail(Gl2Status, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(Gl2Status::Io, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> Gl2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            Gl2Status::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside gl2lab");
            Gl2Status::Internal
        }
    }
}

fn null() -> Fail {
    Fail(Gl2Status::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(Gl2Status::Parse, "argument is not UTF-8".into()))
}

unsafe fn out_arg<'a, T>(out: *mut T) -> Result<&'a mut T, Fail> {
    out.as_mut().ok_or_else(null)
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(Gl2Status::Internal, "interior NUL in output".into()))
}

fn json_out<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> Result<(), Fail> {
    let out = unsafe { out_arg(out)? };
    *out = c_string(serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next gl2lab call on the same thread.
#[no_mangle]
pub extern "C" fn gl2lab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses "a,b,c,d" modulo `n`.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_mat2_parse(
    n: u64,
    text: *const c_char,
    out: *mut *mut Gl2Mat2,
) -> Gl2Status {
    guard(|| {
        let m = parse_mat2(n, str_arg(text)?)?;
        *out_arg(out)? = Box::into_raw(Box::new(Gl2Mat2(m)));
        Ok(())
    })
}

/// # Safety
/// `m` comes from this library and is not used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_mat2_free(m: *mut Gl2Mat2) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Product `a * b` as a new handle.
///
/// # Safety
/// `a`, `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_mat2_mul(
    a: *const Gl2Mat2,
    b: *const Gl2Mat2,
    out: *mut *mut Gl2Mat2,
) -> Gl2Status {
    guard(|| {
        let m = ref_arg(a)?.0.mul(&ref_arg(b)?.0)?;
        *out_arg(out)? = Box::into_raw(Box::new(Gl2Mat2(m)));
        Ok(())
    })
}

/// Determinant and trace as residues.
///
/// # Safety
/// `m` is a live handle; `det` and `trace` are writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_mat2_det_trace(
    m: *const Gl2Mat2,
    det: *mut u64,
    trace: *mut u64,
) -> Gl2Status {
    guard(|| {
        let m = &ref_arg(m)?.0;
        *out_arg(det)? = m.det();
        *out_arg(trace)? = m.trace();
        Ok(())
    })
}

/// Multiplicative order; fails with `NotInvertible` on singular matrices.
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_mat2_order(m: *const Gl2Mat2, out: *mut u64) -> Gl2Status {
    guard(|| {
        *out_arg(out)? = ref_arg(m)?.0.element_order()?;
        Ok(())
    })
}

/// Canonical "a,b,c,d" encoding.
///
/// # Safety
/// `m` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_mat2_to_string(
    m: *const Gl2Mat2,
    out: *mut *mut c_char,
) -> Gl2Status {
    guard(|| {
        *out_arg(out)? = c_string(ref_arg(m)?.0.to_string())?;
        Ok(())
    })
}

/// Subgroup generated by `count` matrices modulo `n` (`count` may be 0).
///
/// # Safety
/// `gens` points to `count` live handles (or is null when `count` is 0).
#[no_mangle]
pub unsafe extern "C" fn gl2lab_subgroup_generate(
    n: u64,
    gens: *const *const Gl2Mat2,
    count: usize,
    out: *mut *mut Gl2Subgroup,
) -> Gl2Status {
    guard(|| {
        let mut list = Vec::with_capacity(count);
        if count > 0 {
            if gens.is_null() {
                return Err(null());
            }
            for &g in std::slice::from_raw_parts(gens, count) {
                list.push(ref_arg(g)?.0);
            }
        }
        let g = Subgroup::closure(n, &list)?;
        *out_arg(out)? = Box::into_raw(Box::new(Gl2Subgroup(g)));
        Ok(())
    })
}

/// A standard subgroup of GL2(p) by name: Cs, Ns, Cns, Nns, B0, D, Z,
/// GammaZ, SL2 or GL2 (case-insensitive).
///
/// # Safety
/// `family` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_subgroup_named(
    family: *const c_char,
    p: u64,
    out: *mut *mut Gl2Subgroup,
) -> Gl2Status {
    guard(|| {
        let name = str_arg(family)?;
        let f: Family = name
            .parse()
            .map_err(|_| Fail(Gl2Status::Parse, format!("unknown family {name}")))?;
        *out_arg(out)? = Box::into_raw(Box::new(Gl2Subgroup(named(f, p)?)));
        Ok(())
    })
}

/// # Safety
/// `g` comes from this library and is not used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_subgroup_free(g: *mut Gl2Subgroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of elements.
///
/// # Safety
/// `g` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_subgroup_order(g: *const Gl2Subgroup, out: *mut u64) -> Gl2Status {
    guard(|| {
        *out_arg(out)? = ref_arg(g)?.0.order() as u64;
        Ok(())
    })
}

/// Whether `m` is an element of `g`.
///
/// # Safety
/// `g`, `m` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_subgroup_contains(
    g: *const Gl2Subgroup,
    m: *const Gl2Mat2,
    out: *mut bool,
) -> Gl2Status {
    guard(|| {
        *out_arg(out)? = ref_arg(g)?.0.contains_element(&ref_arg(m)?.0);
        Ok(())
    })
}

/// Whether some conjugate `m h m^-1` lies in `g` (prime modulus). When found
/// and `witness` is non-null, `*witness` receives `m` as a new handle;
/// otherwise it is set to null.
///
/// # Safety
/// `g`, `h` are live handles; `found` is writable; `witness` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_conjugate_contains(
    g: *const Gl2Subgroup,
    h: *const Gl2Subgroup,
    found: *mut bool,
    witness: *mut *mut Gl2Mat2,
) -> Gl2Status {
    guard(|| {
        let m = conjugate_contains(&ref_arg(g)?.0, &ref_arg(h)?.0)?;
        *out_arg(found)? = m.is_some();
        if let Some(w) = witness.as_mut() {
            *w = m.map_or(ptr::null_mut(), |m| Box::into_raw(Box::new(Gl2Mat2(m))));
        }
        Ok(())
    })
}

/// Shape classification of `g` (prime modulus) as JSON.
///
/// # Safety
/// `g` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_classify_json(
    g: *const Gl2Subgroup,
    out: *mut *mut c_char,
) -> Gl2Status {
    guard(|| {
        let g = &ref_arg(g)?.0;
        json_out(&Classifier::new(g.modulus())?.classify(g)?, out)
    })
}

/// Runs a scan with default budgets. `mode` is "cyclotomic" or "abelian";
/// `cache_dir` may be null. `failed` receives whether an asserted scan found
/// a violation.
///
/// # Safety
/// `mode` is a NUL-terminated string; `cache_dir` is null or one; `out` and
/// `failed` are writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_scan_json(
    mode: *const c_char,
    p: u64,
    degree: u64,
    ramified: bool,
    cache_dir: *const c_char,
    out: *mut *mut c_char,
    failed: *mut bool,
) -> Gl2Status {
    guard(|| {
        let mode = match str_arg(mode)?.to_ascii_lowercase().as_str() {
            "cyclotomic" => ScanMode::Cyclotomic,
            "abelian" => ScanMode::Abelian,
            other => return Err(Fail(Gl2Status::Parse, format!("unknown scan mode {other}"))),
        };
        let cache = if cache_dir.is_null() {
            Cache::disabled()
        } else {
            Cache::at(str_arg(cache_dir)?)
        };
        let report = scan_with(&ScanParams::new(mode, p, degree, ramified), &cache)?;
        *out_arg(failed)? = report.failed();
        json_out(&report, out)
    })
}

/// Runs one verification with default budgets and returns its JSON report.
/// `check` is one of "containment" (needs `part` "a".."d"), "index2-split",
/// "index2-nonsplit", "abelian-shapes", "trivial-sl2" (uses `p` as the modulus and seed 0)
/// or "dickson". `part` may be null otherwise.
///
/// # Safety
/// `check` is a NUL-terminated string; `part` is null or one; `out` and
/// `passed` are writable.
#[no_mangle]
pub unsafe extern "C" fn gl2lab_verify_json(
    check: *const c_char,
    p: u64,
    part: *const c_char,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> Gl2Status {
    guard(|| {
        let b = Budget::default();
        let index2 = |n, c| -> Result<verify::VerifyReport, Fail> {
            Ok(verify::verify_index2_lemma(
                &named(n, p)?,
                &named(c, p)?,
                &b,
            )?)
        };
        let report = match str_arg(check)? {
            "containment" => {
                verify::verify_conjugate_containment(p, LemmaCase::parse(str_arg(part)?)?, &b)?
            }
            "index2-split" => index2(Family::Ns, Family::Cs)?,
            "index2-nonsplit" => index2(Family::Nns, Family::Cns)?,
            "abelian-shapes" => verify::verify_abelian_shapes(p, &b)?,
            "trivial-sl2" => verify::verify_trivial_sl2_part(p, 0, &b)?,
            "dickson" => verify::verify_dickson(p, &b)?,
            other => return Err(Fail(Gl2Status::Parse, format!("unknown check {other}"))),
        };
        *out_arg(passed)? = report.passed;
        json_out(&report, out)
    })
}
