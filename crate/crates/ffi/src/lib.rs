//! C ABI over the `cgc` compiler.
//!
//! Handles are opaque and owned by the caller once returned; each has a
//! matching `*_free`. Every fallible call returns a [`CgcStatus`]; on
//! failure the thread's last error holds a message and, for compile
//! failures, the diagnostic code of the first error.
//!
//! Strings passed in must be NUL-terminated UTF-8. Strings handed out are
//! borrowed from the handle (or the thread-local error slot) and stay valid
//! until the handle is freed or the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use cgc::vm::{compare, run_asm, run_cg, ExecResult, ShadeInput};
use cgc::{compile_str, Compilation, CompileOptions};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgcStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Compilation produced diagnostics; see `cgc_last_error_code`.
    CompileError = 3,
    /// The test-vector document could not be read.
    InputError = 4,
    /// An interpreter failed while executing.
    ExecError = 5,
    /// The requested output semantic does not exist.
    NotFound = 6,
}

/// A compiled program.
pub struct CgcProgram {
    compilation: Compilation,
    listing: CString,
}

/// Results of running one test vector through both interpreters.
pub struct CgcExecution {
    cg: ExecResult,
    asm: ExecResult,
}

/// Which interpreter's result to read.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgcInterpreter {
    Source = 0,
    Assembly = 1,
}

struct LastError {
    message: CString,
    code: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn set_error(code: &str, message: impl Into<String>) {
    let clean = |s: String| CString::new(s.replace('\0', " ")).unwrap_or_default();
    let e = LastError { message: clean(message.into()), code: clean(code.to_string()) };
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(e));
}

fn fail(status: CgcStatus, code: &str, message: impl Into<String>) -> CgcStatus {
    set_error(code, message);
    status
}

/// # Safety
/// `p` is NULL or a NUL-terminated string valid for reads.
unsafe fn text<'a>(p: *const c_char) -> Result<Option<&'a str>, CgcStatus> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p).to_str().map(Some).map_err(|_| fail(CgcStatus::InvalidUtf8, "", "argument is not valid UTF-8"))
}

/// # Safety
/// As [`text`], but NULL is an error.
unsafe fn required<'a>(p: *const c_char, what: &str) -> Result<&'a str, CgcStatus> {
    text(p)?.ok_or_else(|| fail(CgcStatus::NullArgument, "", format!("`{what}` is NULL")))
}

/// Compile `source` for `entry` under `profile`. `limits` is NULL or a
/// comma-separated list of `name=value` overrides. On success `*out`
/// receives a program to release with [`cgc_program_free`].
///
/// # Safety
/// String arguments are NULL or NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgc_compile(
    source: *const c_char,
    entry: *const c_char,
    profile: *const c_char,
    limits: *const c_char,
    out: *mut *mut CgcProgram,
) -> CgcStatus {
    if out.is_null() {
        return fail(CgcStatus::NullArgument, "", "`out` is NULL");
    }
    *out = ptr::null_mut();
    let args = (|| Ok((required(source, "source")?, required(entry, "entry")?, required(profile, "profile")?, text(limits)?)))();
    let (source, entry, profile, limits) = match args {
        Ok(a) => a,
        Err(s) => return s,
    };
    let mut opts = CompileOptions::new(entry, profile);
    opts.limits = limits.map(|l| l.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()).unwrap_or_default();
    match compile_str("<ffi>", source, &opts) {
        Ok(compilation) => {
            let listing = CString::new(compilation.listing.text.clone()).unwrap_or_default();
            *out = Box::into_raw(Box::new(CgcProgram { compilation, listing }));
            CgcStatus::Ok
        }
        Err(d) => {
            let code = d.0.first().map_or("", |x| x.code.as_str());
            fail(CgcStatus::CompileError, code, d.to_string())
        }
    }
}

/// The assembly listing; borrowed from `program`.
///
/// # Safety
/// `program` is NULL or a live handle from [`cgc_compile`].
#[no_mangle]
pub unsafe extern "C" fn cgc_program_listing(program: *const CgcProgram) -> *const c_char {
    program.as_ref().map_or(ptr::null(), |p| p.listing.as_ptr())
}

/// Number of executable instructions in the listing (0 for NULL).
///
/// # Safety
/// `program` is NULL or a live handle from [`cgc_compile`].
#[no_mangle]
pub unsafe extern "C" fn cgc_program_instruction_count(program: *const CgcProgram) -> usize {
    program.as_ref().map_or(0, |p| p.compilation.listing.instruction_count())
}

/// # Safety
/// `program` is NULL or a handle from [`cgc_compile`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cgc_program_free(program: *mut CgcProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Run one test-vector document (JSON, as accepted by the command-line
/// `run`) through both interpreters. Texture paths resolve against the
/// current directory. On success `*out` receives an execution to release
/// with [`cgc_execution_free`].
///
/// # Safety
/// `program` is a live handle; `vectors_json` is NUL-terminated; `out` is
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cgc_execute(
    program: *const CgcProgram,
    vectors_json: *const c_char,
    out: *mut *mut CgcExecution,
) -> CgcStatus {
    if out.is_null() {
        return fail(CgcStatus::NullArgument, "", "`out` is NULL");
    }
    *out = ptr::null_mut();
    let Some(p) = program.as_ref() else { return fail(CgcStatus::NullArgument, "", "`program` is NULL") };
    let json = match required(vectors_json, "vectors_json") {
        Ok(j) => j,
        Err(s) => return s,
    };
    let input = match ShadeInput::from_json_str(json, Path::new(".")) {
        Ok(i) => i,
        Err(e) => return fail(CgcStatus::InputError, "", e.to_string()),
    };
    let c = &p.compilation;
    let cg = match run_cg(&c.tree, &input) {
        Ok(r) => r,
        Err(e) => return fail(CgcStatus::ExecError, "", format!("source interpreter: {e}")),
    };
    let asm = match run_asm(&c.listing, &input, &c.bindings) {
        Ok(r) => r,
        Err(e) => return fail(CgcStatus::ExecError, "", format!("assembly interpreter: {e}")),
    };
    *out = Box::into_raw(Box::new(CgcExecution { cg, asm }));
    CgcStatus::Ok
}

/// 1 when both interpreters agree within `tolerance` per component, 0
/// otherwise (and for NULL).
///
/// # Safety
/// `exec` is NULL or a live handle from [`cgc_execute`].
#[no_mangle]
pub unsafe extern "C" fn cgc_execution_agrees(exec: *const CgcExecution, tolerance: f32) -> i32 {
    exec.as_ref().map_or(0, |e| i32::from(compare(&e.cg, &e.asm, tolerance).equal))
}

/// 1 when the chosen interpreter discarded the fragment.
///
/// # Safety
/// `exec` is NULL or a live handle from [`cgc_execute`].
#[no_mangle]
pub unsafe extern "C" fn cgc_execution_discarded(exec: *const CgcExecution, which: CgcInterpreter) -> i32 {
    exec.as_ref().map_or(0, |e| {
        let r = if which == CgcInterpreter::Source { &e.cg } else { &e.asm };
        i32::from(r.discarded)
    })
}

/// Copy the four components of output `semantic` into `out`.
///
/// # Safety
/// `exec` is a live handle; `semantic` is NUL-terminated; `out` points to
/// four writable floats.
#[no_mangle]
pub unsafe extern "C" fn cgc_execution_output(
    exec: *const CgcExecution,
    which: CgcInterpreter,
    semantic: *const c_char,
    out: *mut f32,
) -> CgcStatus {
    let Some(e) = exec.as_ref() else { return fail(CgcStatus::NullArgument, "", "`exec` is NULL") };
    if out.is_null() {
        return fail(CgcStatus::NullArgument, "", "`out` is NULL");
    }
    let sem = match required(semantic, "semantic") {
        Ok(s) => s,
        Err(s) => return s,
    };
    let r = if which == CgcInterpreter::Source { &e.cg } else { &e.asm };
    match r.output(sem) {
        Some(v) => {
            ptr::copy_nonoverlapping(v.as_ptr(), out, 4);
            CgcStatus::Ok
        }
        None => fail(CgcStatus::NotFound, "", format!("no output for semantic {sem}")),
    }
}

/// # Safety
/// `exec` is NULL or a handle from [`cgc_execute`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cgc_execution_free(exec: *mut CgcExecution) {
    if !exec.is_null() {
        drop(Box::from_raw(exec));
    }
}

/// Message of the last failure on this thread, or NULL.
#[no_mangle]
pub extern "C" fn cgc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Diagnostic code (`E_*`) of the last compile failure on this thread;
/// empty for other failures and NULL when nothing has failed.
#[no_mangle]
pub extern "C" fn cgc_last_error_code() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |e| e.code.as_ptr()))
}
