//! C ABI over `descent-core`.
//!
//! Every fallible function returns a [`DsStatus`]; on failure a message is
//! available from [`ds_last_error_message`] on the same thread. Tables and
//! factor reports are opaque handles released with their `_free` function.
//! Strings returned by the library are released with [`ds_string_free`].
//!
//! # Safety
//!
//! Handle arguments must be NULL or live handles from this library; output
//! pointers must be NULL or valid for writes; paths must be NUL-terminated.
//! NULL arguments are reported as [`DsStatus::NullPointer`], never dereferenced.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use descent_core::beta::{self, BetaTable};
use descent_core::cache;
use descent_core::cyclotomic::{self, FactorReport, Multiplicity};
use descent_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    ResourceLimit = 3,
    Io = 4,
    Format = 5,
    Panic = 6,
}

/// Exact `β_n(S)` for every `S ⊆ [n-1]`, `n <= 24`.
pub struct DsBetaTable(BetaTable);

/// Cyclotomic factors found by [`ds_scan_factors`].
pub struct DsFactorReport(FactorReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DsStatus {
    match e {
        _ if e.is_resource_limit() => DsStatus::ResourceLimit,
        Error::Io(_) => DsStatus::Io,
        Error::Format(_) => DsStatus::Format,
        _ => DsStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (DsStatus, String)>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DsStatus::Panic
        }
    }
}

fn core<T>(r: descent_core::Result<T>) -> Result<T, (DsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

unsafe fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, (DsStatus, String)> {
    // SAFETY: callers pass either NULL or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| (DsStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (DsStatus, String)> {
    if out.is_null() {
        return Err((DsStatus::NullPointer, "output pointer is NULL".into()));
    }
    // SAFETY: checked non-null; the caller guarantees it is writable.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, (DsStatus, String)> {
    if path.is_null() {
        return Err((DsStatus::NullPointer, "path is NULL".into()));
    }
    // SAFETY: checked non-null; the caller passes a NUL-terminated string.
    let s = unsafe { CStr::from_ptr(path) }
        .to_str()
        .map_err(|_| (DsStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
    Ok(Path::new(s))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn ds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn ds_beta_table_build(n: u32, out: *mut *mut DsBetaTable) -> DsStatus {
    guard(|| {
        let table = core(beta::build_beta_table(n))?;
        write_out(out, Box::into_raw(Box::new(DsBetaTable(table))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ds_beta_table_free(table: *mut DsBetaTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ds_beta_table_n(table: *const DsBetaTable) -> u32 {
    // SAFETY: NULL or a live handle.
    unsafe { table.as_ref() }.map_or(0, |t| t.0.n())
}

/// Number of subsets, `2^(n-1)`; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_beta_table_len(table: *const DsBetaTable) -> u64 {
    // SAFETY: NULL or a live handle.
    unsafe { table.as_ref() }.map_or(0, |t| t.0.len() as u64)
}

/// `β_n(S)` where bit `i-1` of `mask` marks element `i` of `S`.
#[no_mangle]
pub unsafe extern "C" fn ds_beta_table_get(table: *const DsBetaTable, mask: u64, out: *mut u64) -> DsStatus {
    guard(|| {
        let t = &non_null(table, "table")?.0;
        if mask >= t.len() as u64 {
            return Err((DsStatus::InvalidArgument, format!("mask {mask:#x} has elements outside [1, {}]", t.n() - 1)));
        }
        write_out(out, t.value(mask))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ds_beta_table_save(table: *const DsBetaTable, path: *const c_char) -> DsStatus {
    guard(|| {
        let t = &non_null(table, "table")?.0;
        core(cache::save_table(t, path_arg(path)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ds_beta_table_load(path: *const c_char, out: *mut *mut DsBetaTable) -> DsStatus {
    guard(|| {
        let table = core(cache::load_table(path_arg(path)?))?;
        write_out(out, Box::into_raw(Box::new(DsBetaTable(table))))
    })
}

/// The proportion of subsets with odd `β_n(S)` as a reduced fraction, `1 <= n <= 32`.
#[no_mangle]
pub unsafe extern "C" fn ds_rho(n: u32, numerator: *mut u64, denominator: *mut u64) -> DsStatus {
    guard(|| {
        let r = core(beta::rho(n))?;
        write_out(numerator, *r.numer())?;
        write_out(denominator, *r.denom())
    })
}

/// Whether `Φ_m` divides `Q_n(t)`.
#[no_mangle]
pub unsafe extern "C" fn ds_divides(table: *const DsBetaTable, m: u64, out: *mut bool) -> DsStatus {
    guard(|| {
        let t = &non_null(table, "table")?.0;
        write_out(out, core(cyclotomic::divides(t, m))?)
    })
}

/// 0 if `Φ_m` does not divide `Q_n`, 1 if it divides once, 2 if `Φ_m^2` divides.
#[no_mangle]
pub unsafe extern "C" fn ds_multiplicity(table: *const DsBetaTable, m: u64, out: *mut u32) -> DsStatus {
    guard(|| {
        let t = &non_null(table, "table")?.0;
        let k = if !core(cyclotomic::divides(t, m))? {
            0
        } else if core(cyclotomic::multiplicity_at_least_2(t, m))? {
            2
        } else {
            1
        };
        write_out(out, k)
    })
}

/// Every `Φ_m` with `m <= m_max` dividing `Q_n`; odd `m > 1` only if `include_odd`.
#[no_mangle]
pub unsafe extern "C" fn ds_scan_factors(
    table: *const DsBetaTable,
    m_max: u64,
    include_odd: bool,
    out: *mut *mut DsFactorReport,
) -> DsStatus {
    guard(|| {
        let t = &non_null(table, "table")?.0;
        let report = core(cyclotomic::scan_factors(t, m_max, include_odd))?;
        write_out(out, Box::into_raw(Box::new(DsFactorReport(report))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ds_factor_report_free(report: *mut DsFactorReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ds_factor_report_len(report: *const DsFactorReport) -> usize {
    // SAFETY: NULL or a live handle.
    unsafe { report.as_ref() }.map_or(0, |r| r.0.factors.len())
}

/// The `index`-th factor in increasing `m`; multiplicity is 1 or 2 (meaning at least 2).
#[no_mangle]
pub unsafe extern "C" fn ds_factor_report_get(
    report: *const DsFactorReport,
    index: usize,
    m: *mut u64,
    multiplicity: *mut u32,
) -> DsStatus {
    guard(|| {
        let r = &non_null(report, "report")?.0;
        let f = r.factors.get(index).ok_or_else(|| {
            (DsStatus::InvalidArgument, format!("index {index} out of range for {} factors", r.factors.len()))
        })?;
        write_out(m, f.m)?;
        write_out(
            multiplicity,
            match f.multiplicity {
                Multiplicity::TwoOrMore => 2,
                _ => 1,
            },
        )
    })
}

/// JSON rendering; release with [`ds_string_free`]. NULL on error.
#[no_mangle]
pub unsafe extern "C" fn ds_factor_report_to_json(report: *const DsFactorReport) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let r = &non_null(report, "report")?.0;
        out = CString::new(r.to_json()).expect("JSON has no NULs").into_raw();
        Ok(())
    });
    out
}

#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
