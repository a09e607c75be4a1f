//! C ABI over the sprego engine.
//!
//! Tables and formulas are opaque handles from [`sprego_table_from_csv`]
//! and [`sprego_formula_parse`], released with the matching `_free`. Every fallible call
//! returns a [`SpregoStatus`]; on failure a message is available from
//! [`sprego_last_error`] on the same thread. Strings handed out by the
//! library are NUL-terminated UTF-8 and must be released with
//! [`sprego_string_free`].

use sprego::competency::classify;
use sprego::equivalence::{result_json, run_suite};
use sprego::eval::{evaluate, EvalContext, Mode};
use sprego::formula::{format, parse, Formula};
use sprego::rewrite::{lint_with, rewrite_with, RewriteContext};
use sprego::table::{load_csv, CsvOptions, Table};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpregoStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    CsvError = 4,
    RewriteRefused = 5,
    RowOutOfRange = 6,
    Panic = 7,
}

/// A loaded table.
pub struct SpregoTable(Table);

/// A parsed formula.
pub struct SpregoFormula(Formula);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Outcome = Result<(), (SpregoStatus, String)>;

fn guard(f: impl FnOnce() -> Outcome) -> SpregoStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpregoStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SpregoStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SpregoStatus, String)> {
    if p.is_null() {
        return Err((SpregoStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (SpregoStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (SpregoStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (SpregoStatus::NullArgument, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T) -> Result<(), (SpregoStatus, String)> {
    if p.is_null() {
        Err((SpregoStatus::NullArgument, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) {
    let c = CString::new(s.replace('\0', " ")).expect("NUL removed");
    *out = c.into_raw();
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn sprego_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sprego_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sprego_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a table from CSV text with a header row.
///
/// # Safety
/// `csv` and `name` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sprego_table_from_csv(
    csv: *const c_char,
    name: *const c_char,
    out: *mut *mut SpregoTable,
) -> SpregoStatus {
    guard(|| {
        out_ptr(out)?;
        let csv = text(csv, "csv")?;
        let name = text(name, "name")?;
        let options = CsvOptions {
            table_name: name.to_string(),
            ..CsvOptions::default()
        };
        let table =
            load_csv(csv.as_bytes(), &options).map_err(|e| (SpregoStatus::CsvError, e.to_string()))?;
        *out = Box::into_raw(Box::new(SpregoTable(table)));
        Ok(())
    })
}

/// Number of data rows, or 0 for null.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sprego_table_rows(table: *const SpregoTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.row_count())
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sprego_table_free(table: *mut SpregoTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Parses a formula.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sprego_formula_parse(
    source: *const c_char,
    out: *mut *mut SpregoFormula,
) -> SpregoStatus {
    guard(|| {
        out_ptr(out)?;
        let f = parse(text(source, "source")?).map_err(|e| (SpregoStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(SpregoFormula(f)));
        Ok(())
    })
}

/// # Safety
/// `formula` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sprego_formula_free(formula: *mut SpregoFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Canonical text of a formula.
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sprego_formula_format(
    formula: *const SpregoFormula,
    out: *mut *mut c_char,
) -> SpregoStatus {
    guard(|| {
        out_ptr(out)?;
        let f = handle(formula, "formula")?;
        put_string(out, format(&f.0));
        Ok(())
    })
}

/// Evaluates a formula and writes the result as JSON: a value, or an
/// array of rows for a block. `row` 0 selects array mode,
/// otherwise scalar mode at that 1-based data row.
///
/// # Safety
/// Handles must be live; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sprego_evaluate_json(
    formula: *const SpregoFormula,
    table: *const SpregoTable,
    row: u32,
    seed: u64,
    out_json: *mut *mut c_char,
) -> SpregoStatus {
    guard(|| {
        out_ptr(out_json)?;
        let f = handle(formula, "formula")?;
        let t = handle(table, "table")?;
        let ctx = EvalContext::new(&t.0).with_seed(seed);
        let ctx = if row == 0 {
            ctx.with_mode(Mode::Array)
        } else if row as usize <= t.0.row_count() {
            ctx.with_row(row)
        } else {
            return Err((
                SpregoStatus::RowOutOfRange,
                format!("row {row} is outside the table's {} rows", t.0.row_count()),
            ));
        };
        put_string(out_json, result_json(&evaluate(&f.0, &ctx)).to_string());
        Ok(())
    })
}

fn context(table: Option<&SpregoTable>) -> RewriteContext {
    match table {
        Some(t) => RewriteContext::default().with_table(t.0.name(), t.0.headers().map(String::from)),
        None => RewriteContext::default(),
    }
}

/// Lint diagnostics as a JSON array. `table` may be null; when given, its
/// headers let lookups over the named table be rewritten.
///
/// # Safety
/// `formula` must be live, `table` null or live; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn sprego_lint_json(
    formula: *const SpregoFormula,
    table: *const SpregoTable,
    out_json: *mut *mut c_char,
) -> SpregoStatus {
    guard(|| {
        out_ptr(out_json)?;
        let f = handle(formula, "formula")?;
        let diagnostics = lint_with(&f.0, &context(table.as_ref()));
        put_string(out_json, serde_json::to_string(&diagnostics).expect("serializable"));
        Ok(())
    })
}

/// Rewrites problem-specific calls into a new formula handle. Refusals
/// return `SPREGO_STATUS_REWRITE_REFUSED` with the reason as the last
/// error.
///
/// # Safety
/// `formula` must be live, `table` null or live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sprego_rewrite(
    formula: *const SpregoFormula,
    table: *const SpregoTable,
    out: *mut *mut SpregoFormula,
) -> SpregoStatus {
    guard(|| {
        out_ptr(out)?;
        let f = handle(formula, "formula")?;
        let r = rewrite_with(&f.0, &context(table.as_ref()))
            .map_err(|e| (SpregoStatus::RewriteRefused, e.to_string()))?;
        *out = Box::into_raw(Box::new(SpregoFormula(r.formula)));
        Ok(())
    })
}

/// Competency profile as JSON.
///
/// # Safety
/// `formula` must be live; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn sprego_classify_json(
    formula: *const SpregoFormula,
    out_json: *mut *mut c_char,
) -> SpregoStatus {
    guard(|| {
        out_ptr(out_json)?;
        let f = handle(formula, "formula")?;
        put_string(out_json, serde_json::to_string(&classify(&f.0)).expect("serializable"));
        Ok(())
    })
}

/// Runs every shipped rule case and writes the report as JSON.
/// `*passed` is set to 1 when every case passed, else 0.
///
/// # Safety
/// `out_json` and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sprego_check_all_rules_json(
    seed: u64,
    trials: usize,
    passed: *mut i32,
    out_json: *mut *mut c_char,
) -> SpregoStatus {
    guard(|| {
        out_ptr(out_json)?;
        out_ptr(passed)?;
        let report = run_suite(seed, trials);
        *passed = i32::from(report.passed);
        put_string(out_json, serde_json::to_string(&report).expect("serializable"));
        Ok(())
    })
}
