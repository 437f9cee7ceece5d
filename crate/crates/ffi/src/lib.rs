//! C ABI over the report pipeline.
//!
//! Every call returns an [`RfStatus`]. On failure, [`rf_last_error`] gives a
//! message for the calling thread. Strings returned by this library are owned
//! by the caller and released with [`rf_string_free`]; reports with
//! [`rf_report_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use residue_forge::error::Error;
use residue_forge::report::{run, Format, Mode, PsiChoice, Report, RunConfig, TheoremChoice, DEFAULT_SEED};

/// Status codes. `RF_ORACLE_FAILURE` still yields a valid report.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfStatus {
    RF_OK = 0,
    RF_ORACLE_FAILURE = 1,
    RF_USAGE = 2,
    RF_NULL_POINTER = 3,
    RF_INVALID_ARGUMENT = 4,
    RF_ENGINE_ERROR = 5,
    RF_PANIC = 6,
}

pub const RF_THEOREM_ONE: u32 = 1;
pub const RF_THEOREM_TWO: u32 = 2;
pub const RF_THEOREM_INTERIOR: u32 = 3;

pub const RF_PSI_GENERIC: u32 = 0;
pub const RF_PSI_F: u32 = 1;
pub const RF_PSI_VECTOR: u32 = 2;
pub const RF_PSI_BIVECTOR: u32 = 3;
pub const RF_PSI_TRIVECTOR: u32 = 4;

pub const RF_MODE_SYMBOLIC: u32 = 0;
pub const RF_MODE_VERIFY: u32 = 1;
pub const RF_MODE_BOTH: u32 = 2;

/// Seed used by the command line when none is given.
pub const RF_DEFAULT_SEED: u64 = 20_240_917;
const _: () = assert!(RF_DEFAULT_SEED == DEFAULT_SEED);

/// Opaque report handle.
pub struct RfReport {
    report: Report,
    all_pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: RfStatus, msg: impl Into<String>) -> RfStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> RfStatus) -> RfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RfStatus::RF_PANIC, msg)
        }
    }
}

fn theorem_from(v: u32) -> Option<TheoremChoice> {
    match v {
        RF_THEOREM_ONE => Some(TheoremChoice::One),
        RF_THEOREM_TWO => Some(TheoremChoice::Two),
        RF_THEOREM_INTERIOR => Some(TheoremChoice::Interior),
        _ => None,
    }
}

fn psi_from(v: u32) -> Option<PsiChoice> {
    match v {
        RF_PSI_GENERIC => Some(PsiChoice::Generic),
        RF_PSI_F => Some(PsiChoice::F),
        RF_PSI_VECTOR => Some(PsiChoice::Vector),
        RF_PSI_BIVECTOR => Some(PsiChoice::Bivector),
        RF_PSI_TRIVECTOR => Some(PsiChoice::Trivector),
        _ => None,
    }
}

fn mode_from(v: u32) -> Option<Mode> {
    match v {
        RF_MODE_SYMBOLIC => Some(Mode::Symbolic),
        RF_MODE_VERIFY => Some(Mode::Verify),
        RF_MODE_BOTH => Some(Mode::Both),
        _ => None,
    }
}

fn give_string(s: String, out: *mut *mut c_char) -> RfStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: `out` checked non-null by the caller of this helper.
            unsafe { *out = c.into_raw() };
            RfStatus::RF_OK
        }
        Err(_) => fail(RfStatus::RF_ENGINE_ERROR, "output contains a NUL byte"),
    }
}

/// Runs one pipeline and stores a new report in `*out`.
///
/// Returns `RF_OK` when every oracle check passes, `RF_ORACLE_FAILURE` when
/// some fail (the report is still stored), and an error code otherwise
/// (`*out` is set to NULL).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_run(theorem: u32, psi: u32, mode: u32, seed: u64, out: *mut *mut RfReport) -> RfStatus {
    guarded(|| {
        if out.is_null() {
            return fail(RfStatus::RF_NULL_POINTER, "out is NULL");
        }
        *out = ptr::null_mut();
        let (Some(theorem), Some(psi), Some(mode)) = (theorem_from(theorem), psi_from(psi), mode_from(mode)) else {
            return fail(
                RfStatus::RF_INVALID_ARGUMENT,
                format!("invalid selector: theorem={theorem} psi={psi} mode={mode}"),
            );
        };
        let config = RunConfig { theorem, psi, mode, seed, format: Format::Json, out: None };
        match run(&config) {
            Ok(o) => {
                let status = if o.all_pass { RfStatus::RF_OK } else { RfStatus::RF_ORACLE_FAILURE };
                if status == RfStatus::RF_ORACLE_FAILURE {
                    set_error("one or more oracle checks failed");
                }
                *out = Box::into_raw(Box::new(RfReport { report: o.report, all_pass: o.all_pass }));
                status
            }
            Err(e @ Error::Usage(_)) => fail(RfStatus::RF_USAGE, e.to_string()),
            Err(e) => fail(RfStatus::RF_ENGINE_ERROR, e.to_string()),
        }
    })
}

/// Writes the JSON report to `*out`; free it with [`rf_string_free`].
///
/// # Safety
/// `report` must come from [`rf_run`] and not be freed; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_report_json(report: *const RfReport, out: *mut *mut c_char) -> RfStatus {
    guarded(|| {
        if report.is_null() || out.is_null() {
            return fail(RfStatus::RF_NULL_POINTER, "report or out is NULL");
        }
        match (*report).report.to_json() {
            Ok(s) => give_string(s, out),
            Err(e) => fail(RfStatus::RF_ENGINE_ERROR, e.to_string()),
        }
    })
}

/// Writes the LaTeX report to `*out`; free it with [`rf_string_free`].
///
/// # Safety
/// As for [`rf_report_json`].
#[no_mangle]
pub unsafe extern "C" fn rf_report_latex(report: *const RfReport, out: *mut *mut c_char) -> RfStatus {
    guarded(|| {
        if report.is_null() || out.is_null() {
            return fail(RfStatus::RF_NULL_POINTER, "report or out is NULL");
        }
        match (*report).report.to_latex() {
            Ok(s) => give_string(s, out),
            Err(e) => fail(RfStatus::RF_ENGINE_ERROR, e.to_string()),
        }
    })
}

/// 1 when every oracle check passed, 0 otherwise or for NULL.
///
/// # Safety
/// `report` must be NULL or come from [`rf_run`].
#[no_mangle]
pub unsafe extern "C" fn rf_report_all_pass(report: *const RfReport) -> i32 {
    if report.is_null() {
        return 0;
    }
    i32::from((*report).all_pass)
}

/// Number of oracle rows, or 0 for NULL.
///
/// # Safety
/// `report` must be NULL or come from [`rf_run`].
#[no_mangle]
pub unsafe extern "C" fn rf_report_oracle_count(report: *const RfReport) -> usize {
    if report.is_null() {
        return 0;
    }
    (*report).report.oracle.len()
}

/// Releases a report; NULL is ignored.
///
/// # Safety
/// `report` must be NULL or come from [`rf_run`], and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn rf_report_free(report: *mut RfReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must be NULL or come from this library, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn rf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or NULL. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn rf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}
