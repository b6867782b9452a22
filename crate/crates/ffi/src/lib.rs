//! C ABI for the ttstar solver and data algebra.
//!
//! Conventions:
//! * Solutions are returned through opaque `TtstarSolution` handles; free
//!   them with [`ttstar_solution_free`].
//! * Strings returned by `*_json` / gamma functions are NUL-terminated,
//!   heap-allocated by Rust, and must be released with
//!   [`ttstar_string_free`].
//! * Every fallible call returns a [`TtstarStatus`]; on failure a
//!   human-readable message is available from [`ttstar_last_error`] until the
//!   next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ttstar::holodata::{self, case_spec, parse_rational, GammaPair, MonomialData};
use ttstar::identities;
use ttstar::toda::{self, BoundaryData, SolveConfig, Solution, SystemSpec};
use ttstar::{Error, RadialGrid};

/// Status codes shared by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TtstarStatus {
    TtstarOk = 0,
    TtstarInvalidArgument = 1,
    TtstarOutOfRange = 2,
    TtstarNoConvergence = 3,
    TtstarInternal = 4,
    TtstarIo = 5,
    TtstarPanic = 6,
}

/// Profile selector for [`ttstar_solution_profile`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TtstarProfile {
    TtstarProfileW0 = 0,
    TtstarProfileW1 = 1,
    TtstarProfileQ0 = 2,
    TtstarProfileQ1 = 3,
    TtstarProfileH = 4,
    TtstarProfileS = 5,
    TtstarProfileR = 6,
}

/// Opaque solution handle.
pub struct TtstarSolution {
    inner: Solution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).unwrap());
}

fn status_of(err: &Error) -> TtstarStatus {
    match err {
        Error::InvalidParameter(_) => TtstarStatus::TtstarInvalidArgument,
        Error::OutOfRange(_) => TtstarStatus::TtstarOutOfRange,
        Error::NoConvergence { .. } => TtstarStatus::TtstarNoConvergence,
        Error::Internal(_) => TtstarStatus::TtstarInternal,
        Error::Io(_) => TtstarStatus::TtstarIo,
    }
}

fn guarded<T>(f: impl FnOnce() -> Result<T, Error>, sink: impl FnOnce(T)) -> TtstarStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            sink(v);
            TtstarStatus::TtstarOk
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside ttstar");
            TtstarStatus::TtstarPanic
        }
    }
}

fn to_c_string(s: String) -> *mut c_char {
    let cleaned: String = s.chars().filter(|&c| c != '\0').collect();
    CString::new(cleaned).map_or(std::ptr::null_mut(), CString::into_raw)
}

/// Last error message on this thread; empty when no error has occurred.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ttstar_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string allocated by this library.
///
/// # Safety
/// `s` must come from a `ttstar_*` function returning `char*` and must not be
/// freed twice.
#[no_mangle]
pub unsafe extern "C" fn ttstar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Solve the system for exponents (a, b) and asymptotic data
/// (gamma0, gamma1) on the log-radial grid [s_min, s_max] with m nodes.
/// Pass m = 0 for the default grid (-14, 3, 1701).
///
/// # Safety
/// `out` must be a valid pointer to a `TtstarSolution*` slot.
#[no_mangle]
pub unsafe extern "C" fn ttstar_solve(
    a: f64,
    b: f64,
    gamma0: f64,
    gamma1: f64,
    s_min: f64,
    s_max: f64,
    m: usize,
    out: *mut *mut TtstarSolution,
) -> TtstarStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return TtstarStatus::TtstarInvalidArgument;
    }
    guarded(
        || {
            let grid = if m == 0 {
                RadialGrid::default_grid()
            } else {
                RadialGrid::new(s_min, s_max, m)?
            };
            let spec = SystemSpec::new(a, b)?;
            toda::solve(&spec, BoundaryData::new(gamma0, gamma1), grid, &SolveConfig::default())
        },
        |sol| {
            *out = Box::into_raw(Box::new(TtstarSolution { inner: sol }));
        },
    )
}

/// Number of grid nodes in a solution.
///
/// # Safety
/// `sol` must be a live handle from [`ttstar_solve`].
#[no_mangle]
pub unsafe extern "C" fn ttstar_solution_len(sol: *const TtstarSolution) -> usize {
    if sol.is_null() {
        return 0;
    }
    (*sol).inner.w0.len()
}

/// Copy one profile (or the s/r coordinate axes) into `buf`, which must hold
/// `len >= ttstar_solution_len(sol)` doubles.
///
/// # Safety
/// `sol` must be a live handle and `buf` must point to at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ttstar_solution_profile(
    sol: *const TtstarSolution,
    which: TtstarProfile,
    buf: *mut f64,
    len: usize,
) -> TtstarStatus {
    if sol.is_null() || buf.is_null() {
        set_error("null pointer");
        return TtstarStatus::TtstarInvalidArgument;
    }
    let inner = &(*sol).inner;
    let n = inner.w0.len();
    if len < n {
        set_error("buffer too small");
        return TtstarStatus::TtstarInvalidArgument;
    }
    let grid = inner.w0.grid();
    let dst = std::slice::from_raw_parts_mut(buf, n);
    match which {
        TtstarProfile::TtstarProfileW0 => dst.copy_from_slice(inner.w0.values()),
        TtstarProfile::TtstarProfileW1 => dst.copy_from_slice(inner.w1.values()),
        TtstarProfile::TtstarProfileQ0 => dst.copy_from_slice(inner.q0.values()),
        TtstarProfile::TtstarProfileQ1 => dst.copy_from_slice(inner.q1.values()),
        TtstarProfile::TtstarProfileH => dst.copy_from_slice(inner.h.values()),
        TtstarProfile::TtstarProfileS => {
            for (i, v) in dst.iter_mut().enumerate() {
                *v = grid.s(i);
            }
        }
        TtstarProfile::TtstarProfileR => {
            for (i, v) in dst.iter_mut().enumerate() {
                *v = grid.r(i);
            }
        }
    }
    TtstarStatus::TtstarOk
}

/// Verification report for a solution as a JSON document (schema matching the
/// CLI), or NULL on serialization failure.
///
/// # Safety
/// `sol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ttstar_solution_report_json(sol: *const TtstarSolution) -> *mut c_char {
    if sol.is_null() {
        return std::ptr::null_mut();
    }
    let inner = &(*sol).inner;
    let report = identities::verify(inner);
    let doc = serde_json::json!({
        "schema": 1,
        "spec": inner.spec,
        "boundary": inner.boundary,
        "mirrored": inner.mirrored,
        "iterations": inner.iterations,
        "final_delta": inner.final_delta,
        "ladder_uncertainty": inner.ladder_uncertainty,
        "verification": report,
    });
    to_c_string(doc.to_string())
}

/// Release a solution handle.
///
/// # Safety
/// `sol` must come from [`ttstar_solve`] and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ttstar_solution_free(sol: *mut TtstarSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(Error::InvalidParameter("null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::InvalidParameter("string is not UTF-8".into()))
}

/// gamma for the case (l1, l2) (l2 = 0 for single-block rows) from the
/// comma-separated class exponents in `k_csv` (rationals like "-2/3").
/// Returns "g0 g1" computed by the closed form; with `check` nonzero the
/// first-principles derivation is cross-run and a mismatch fails with
/// TTSTAR_INTERNAL. Free the result with [`ttstar_string_free`].
///
/// # Safety
/// `k_csv` must be a NUL-terminated string and `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn ttstar_gamma_from_exponents(
    l1: u32,
    l2: u32,
    k_csv: *const c_char,
    check: i32,
    out: *mut *mut c_char,
) -> TtstarStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return TtstarStatus::TtstarInvalidArgument;
    }
    guarded(
        || {
            let ks = cstr(k_csv)?;
            let case = case_spec(l1, l2)?;
            let class_k = ks
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>, _>>()?;
            let data = MonomialData::from_class_exponents(&case, &class_k, None)?;
            let closed = holodata::gamma_from_exponents(&case, &data);
            if check != 0 {
                let derived = holodata::derive_gamma(&case, &data)?;
                if derived != closed {
                    return Err(Error::Internal(format!(
                        "route disagreement: closed {closed} vs derived {derived}"
                    )));
                }
            }
            Ok(closed.to_string())
        },
        |s| *out = to_c_string(s),
    )
}

/// Invert gamma: class exponents for the case (l1, l2) with the given
/// "g0,g1" and total degree (rationals). Returns them space-separated.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be a valid slot.
#[no_mangle]
pub unsafe extern "C" fn ttstar_exponents_from_gamma(
    l1: u32,
    l2: u32,
    gamma_csv: *const c_char,
    total_degree: *const c_char,
    out: *mut *mut c_char,
) -> TtstarStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return TtstarStatus::TtstarInvalidArgument;
    }
    guarded(
        || {
            let gs = cstr(gamma_csv)?;
            let parts: Vec<&str> = gs.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::InvalidParameter("gamma_csv must be \"g0,g1\"".into()));
            }
            let case = case_spec(l1, l2)?;
            let gp = GammaPair::new(parse_rational(parts[0])?, parse_rational(parts[1])?);
            let total = parse_rational(cstr(total_degree)?)?;
            let ks = holodata::exponents_from_gamma(&case, &gp, &total)?;
            Ok(ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" "))
        },
        |s| *out = to_c_string(s),
    )
}

/// The worked-example catalog as JSON (name, case, data, tabulated and
/// derived gamma, discrepancy flag, admissibility).
/// Free with [`ttstar_string_free`]; NULL on internal failure.
#[no_mangle]
pub extern "C" fn ttstar_catalog_json() -> *mut c_char {
    let result = catch_unwind(|| {
        let entries = holodata::catalog().ok()?;
        let rows: Vec<serde_json::Value> = entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "case": [e.case.l1, e.case.l2],
                    "a": e.case.a,
                    "b": e.case.b,
                    "exponents": e.data.exponents().iter().map(|k| k.to_string()).collect::<Vec<_>>(),
                    "coefficients": e.data.coefficients(),
                    "gamma_printed": e.gamma_printed.to_string(),
                    "gamma_derived": e.gamma_derived.to_string(),
                    "discrepant": e.discrepant,
                    "admissibility": e.admissibility.label(),
                })
            })
            .collect();
        Some(serde_json::json!({ "schema": 1, "entries": rows }).to_string())
    });
    match result {
        Ok(Some(s)) => to_c_string(s),
        _ => std::ptr::null_mut(),
    }
}

/// Structure checks for a block pattern (identity T). Returns the report as
/// JSON; free with [`ttstar_string_free`].
///
/// # Safety
/// `blocks` must point to `n_blocks` readable entries; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ttstar_verify_structure(
    blocks: *const u32,
    n_blocks: usize,
    out: *mut *mut c_char,
) -> TtstarStatus {
    if out.is_null() || blocks.is_null() {
        set_error("null pointer");
        return TtstarStatus::TtstarInvalidArgument;
    }
    let sizes: Vec<usize> = std::slice::from_raw_parts(blocks, n_blocks)
        .iter()
        .map(|&b| b as usize)
        .collect();
    guarded(
        || {
            let rep = holodata::verify_structure(&sizes, None)?;
            serde_json::to_string(&rep).map_err(|e| Error::Internal(e.to_string()))
        },
        |s| *out = to_c_string(s),
    )
}
