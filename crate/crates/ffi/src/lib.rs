//! C ABI for coarse-kit.
//!
//! Complexes are opaque `CkComplex` handles owned by the caller and released
//! with `ck_complex_free`. Every fallible call returns a `CkStatus`; on
//! failure `ck_last_error` describes the problem for the calling thread.
//! Strings returned through out-parameters are released with `ck_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;

use coarse_kit::cochain::{homology, Method};
use coarse_kit::complex::io::{from_json, to_json};
use coarse_kit::complex::{circle, CellComplex};
use coarse_kit::constructions::{build_Mk, ConstructionError, MkParams, NMode};
use coarse_kit::degree::bezout;
use coarse_kit::report::{verify_prop51, verify_prop52, verify_tower, ReportError, RunOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeGuard = 3,
    Parse = 4,
    Computation = 5,
    Panic = 6,
}

/// Opaque handle to an immutable complex.
pub struct CkComplex {
    inner: Arc<CellComplex>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

struct Fail(CkStatus, String);

impl From<ReportError> for Fail {
    fn from(e: ReportError) -> Fail {
        let code = match &e {
            ReportError::Construction(ConstructionError::SizeGuardExceeded { .. }) => CkStatus::SizeGuard,
            e if e.is_usage() => CkStatus::InvalidArgument,
            ReportError::Witness(_) => CkStatus::Parse,
            _ => CkStatus::Computation,
        };
        Fail(code, e.to_string())
    }
}

impl From<ConstructionError> for Fail {
    fn from(e: ConstructionError) -> Fail {
        ReportError::from(e).into()
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CkStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            CkStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(CkStatus::NullPointer, "null pointer argument".into())
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn complex_ref<'a>(p: *const CkComplex) -> Result<&'a CkComplex, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(CkStatus::Parse, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

fn handle(cx: Arc<CellComplex>) -> *mut CkComplex {
    Box::into_raw(Box::new(CkComplex { inner: cx }))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ck_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ck_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `cx` must be null or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_complex_free(cx: *mut CkComplex) {
    if !cx.is_null() {
        drop(Box::from_raw(cx));
    }
}

/// The boundary of an `n`-gon, `n ≥ 3`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_circle_new(n: usize, out: *mut *mut CkComplex) -> CkStatus {
    guard(|| {
        let out = out_ref(out)?;
        let cx = circle(n).map_err(|e| Fail(CkStatus::InvalidArgument, e.to_string()))?;
        *out = handle(Arc::new(cx));
        Ok(())
    })
}

/// The bundle `M_k` for primes `p ≠ q`; `reduce` selects linear circle sizes.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_mk_new(p: u64, q: u64, k: u32, reduce: bool, out: *mut *mut CkComplex) -> CkStatus {
    guard(|| {
        let out = out_ref(out)?;
        let params = MkParams { reduce, ..MkParams::new(p, q, k) };
        *out = handle(build_Mk(&params)?.complex);
        Ok(())
    })
}

/// Parses a complex from the JSON interchange format.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_complex_from_json(json: *const c_char, out: *mut *mut CkComplex) -> CkStatus {
    guard(|| {
        let out = out_ref(out)?;
        let cx = from_json(read_str(json)?).map_err(|e| Fail(CkStatus::Parse, e.to_string()))?;
        *out = handle(Arc::new(cx));
        Ok(())
    })
}

/// # Safety
/// `cx` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_complex_to_json(cx: *const CkComplex, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let cx = complex_ref(cx)?;
        *out_ref(out)? = into_c_string(to_json(&cx.inner));
        Ok(())
    })
}

/// # Safety
/// `cx` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_complex_dim(cx: *const CkComplex, out: *mut usize) -> CkStatus {
    guard(|| {
        *out_ref(out)? = complex_ref(cx)?.inner.dim();
        Ok(())
    })
}

/// Number of `k`-cells; zero above the dimension.
///
/// # Safety
/// `cx` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_complex_count(cx: *const CkComplex, k: usize, out: *mut usize) -> CkStatus {
    guard(|| {
        let cx = &complex_ref(cx)?.inner;
        *out_ref(out)? = cx.counts().get(k).copied().unwrap_or(0);
        Ok(())
    })
}

/// # Safety
/// `cx` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_complex_euler(cx: *const CkComplex, out: *mut i64) -> CkStatus {
    guard(|| {
        *out_ref(out)? = complex_ref(cx)?.inner.euler_characteristic();
        Ok(())
    })
}

/// Free rank of `H_k`, and the number of nontrivial torsion summands.
///
/// # Safety
/// `cx` must be a live handle; `rank` and `torsion` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ck_homology(cx: *const CkComplex, k: usize, rank: *mut usize, torsion: *mut usize) -> CkStatus {
    guard(|| {
        let cx = &complex_ref(cx)?.inner;
        let (rank, torsion) = (out_ref(rank)?, out_ref(torsion)?);
        let h = homology(cx, k).map_err(|e| Fail(CkStatus::InvalidArgument, e.to_string()))?;
        *rank = h.free_rank;
        *torsion = h.torsion.iter().filter(|t| **t != 1.into()).count();
        Ok(())
    })
}

/// `(n, m)` with `n·p^k + m·q^k = 1` and `|m|` minimal.
///
/// # Safety
/// `n` and `m` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ck_bezout(p: i64, q: i64, k: u32, n: *mut i64, m: *mut i64) -> CkStatus {
    guard(|| {
        let (n, m) = (out_ref(n)?, out_ref(m)?);
        let (a, b) = bezout(p, q, k).map_err(|e| Fail(CkStatus::InvalidArgument, e.to_string()))?;
        *n = a;
        *m = b;
        Ok(())
    })
}

/// Runs a verification command and returns its JSON report.
///
/// `command` is `"prop51"`, `"prop52"` or `"tower"`. `params_json` is an
/// object with `p`, `q`, `k` and optional `reduce`, `edge_scale`, `budget`,
/// `node_limit`, `method` (`"auto"` or `"ilp"`), `stages`, `n_mode` (`"lcm"` or `"factorial"`) and `out`
/// (a directory for witness files). `exit_code` receives 0 for pass, 1 for
/// fail and 2 for inconclusive.
///
/// # Safety
/// String arguments must be nul-terminated; out-parameters must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ck_verify(
    command: *const c_char,
    params_json: *const c_char,
    report: *mut *mut c_char,
    exit_code: *mut i32,
) -> CkStatus {
    guard(|| {
        let command = read_str(command)?;
        let v: serde_json::Value =
            serde_json::from_str(read_str(params_json)?).map_err(|e| Fail(CkStatus::Parse, e.to_string()))?;
        let (report, exit_code) = (out_ref(report)?, out_ref(exit_code)?);
        let params: MkParams =
            serde_json::from_value(v.clone()).map_err(|e| Fail(CkStatus::InvalidArgument, e.to_string()))?;
        let mut run = RunOptions::default();
        if let Some(n) = v.get("node_limit").and_then(|x| x.as_u64()) {
            run.node_limit = n;
        }
        match v.get("method").and_then(|x| x.as_str()) {
            None | Some("auto") => {}
            Some("ilp") => run.method = Method::Ilp,
            Some(other) => return Err(Fail(CkStatus::InvalidArgument, format!("unknown method {other}"))),
        }
        run.out = v.get("out").and_then(|x| x.as_str()).map(PathBuf::from);
        let rep = match command {
            "prop51" => verify_prop51(&params, &run)?,
            "prop52" => {
                let mode = match v.get("n_mode").and_then(|x| x.as_str()).unwrap_or("lcm") {
                    "lcm" => NMode::Lcm,
                    "factorial" => NMode::Factorial,
                    other => return Err(Fail(CkStatus::InvalidArgument, format!("unknown n_mode {other}"))),
                };
                verify_prop52(&params, mode, &run)?
            }
            "tower" => {
                let stages = v.get("stages").and_then(|x| x.as_u64()).unwrap_or(1) as u32;
                verify_tower(&params, stages, &run)?
            }
            other => return Err(Fail(CkStatus::InvalidArgument, format!("unknown command {other}"))),
        };
        *exit_code = rep.exit_code();
        *report = into_c_string(rep.to_json());
        Ok(())
    })
}
