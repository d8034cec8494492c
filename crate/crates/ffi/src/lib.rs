//! C interface to `tgdc`.
//!
//! Models are opaque handles. Every fallible call returns a [`TgdcStatus`];
//! on failure the message is available from [`tgdc_last_error_message`]
//! on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tgdc::bound::compute_schedule_bound;
use tgdc::cli::solve_model;
use tgdc::counter::{compile_2cm, TwoCounterMachine};
use tgdc::format::{check_model, write_model};
use tgdc::model::Model;
use tgdc::semantics::Objective;
use tgdc::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TgdcStatus {
    Ok = 0,
    /// The game was solved and is not winning.
    NotWinning = 1,
    NullArgument = -1,
    InvalidUtf8 = -2,
    Parse = -3,
    InvalidModel = -4,
    Unsupported = -5,
    Internal = -6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TgdcObjective {
    Reach = 0,
    Safe = 1,
}

/// Schedule bound; `-1` stands for infinity.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TgdcBound {
    pub tmin: i64,
    pub smax: u64,
    pub dmax: u32,
    pub bound: i64,
}

/// Opaque model handle.
pub struct TgdcModel {
    model: Model,
    diagnostics: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> TgdcStatus {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::UnknownClock(_) => TgdcStatus::Parse,
        Error::InvalidModel(_) | Error::Dimension(..) => TgdcStatus::InvalidModel,
        Error::Unsupported(_) | Error::OraclePrecondition(_) | Error::CapExceeded(_) => TgdcStatus::Unsupported,
        _ => TgdcStatus::Internal,
    }
}

fn fail(e: Error) -> TgdcStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn guarded(f: impl FnOnce() -> TgdcStatus) -> TgdcStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        TgdcStatus::Internal
    })
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, TgdcStatus> {
    if p.is_null() {
        set_error("null argument");
        return Err(TgdcStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        TgdcStatus::InvalidUtf8
    })
}

/// Parses and validates a JSON model file. On success `*out` owns a
/// handle to release with [`tgdc_model_free`]. Validation failures return
/// `INVALID_MODEL` with all diagnostics joined in the error message.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tgdc_model_from_json(json: *const c_char, out: *mut *mut TgdcModel) -> TgdcStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null argument");
            return TgdcStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let s = match text(json) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match check_model(s) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(TgdcModel { model, diagnostics: 0 }));
                TgdcStatus::Ok
            }
            Err(diags) => {
                let msg: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
                set_error(msg.join("; "));
                TgdcStatus::InvalidModel
            }
        }
    })
}

/// # Safety
/// `model` must come from [`tgdc_model_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tgdc_model_free(model: *mut TgdcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Validation diagnostics of a loaded model; always 0, since loading
/// rejects models with diagnostics. `-1` on a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tgdc_model_diagnostic_count(model: *const TgdcModel) -> i64 {
    model.as_ref().map_or(-1, |m| m.diagnostics as i64)
}

/// 1 for a delayed game, 0 for a classical one, -1 on a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tgdc_model_is_delayed(model: *const TgdcModel) -> c_int {
    match model.as_ref() {
        Some(m) => c_int::from(matches!(m.model, Model::Delayed(_))),
        None => -1,
    }
}

/// Solves the model. Delayed games go through reduction with cap `cap`,
/// or the model's cap, or the computed bound when `cap` is negative.
/// Returns `OK` when winning and `NOT_WINNING` otherwise; `*winning` is
/// set to 1 or 0 in both cases.
///
/// # Safety
/// `model` must be a live handle and `winning` writable or null.
#[no_mangle]
pub unsafe extern "C" fn tgdc_solve(
    model: *const TgdcModel,
    objective: TgdcObjective,
    cap: i64,
    winning: *mut c_int,
) -> TgdcStatus {
    guarded(|| {
        let Some(m) = model.as_ref() else {
            set_error("null model");
            return TgdcStatus::NullArgument;
        };
        let obj = match objective {
            TgdcObjective::Reach => Objective::Reach,
            TgdcObjective::Safe => Objective::Safe,
        };
        let cap = usize::try_from(cap).ok();
        match solve_model(&m.model, obj, cap) {
            Ok(ms) => {
                let w = ms.solution.winning;
                if !winning.is_null() {
                    *winning = c_int::from(w);
                }
                if w {
                    TgdcStatus::Ok
                } else {
                    TgdcStatus::NotWinning
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Schedule-length bound of a delayed game.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tgdc_bound(model: *const TgdcModel, out: *mut TgdcBound) -> TgdcStatus {
    guarded(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            set_error("null argument");
            return TgdcStatus::NullArgument;
        };
        let Model::Delayed(d) = &m.model else {
            return fail(Error::Unsupported("bound needs a tgdc model".into()));
        };
        let b = compute_schedule_bound(d);
        *out = TgdcBound {
            tmin: b.tmin.unwrap_or(-1),
            smax: b.smax as u64,
            dmax: b.dmax,
            bound: b.bound.map_or(-1, |v| v as i64),
        };
        TgdcStatus::Ok
    })
}

/// Compiles two-counter-machine text into a model file; `*out_json` must
/// be released with [`tgdc_string_free`].
///
/// # Safety
/// `program` must be a NUL-terminated string and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn tgdc_compile_2cm(program: *const c_char, out_json: *mut *mut c_char) -> TgdcStatus {
    guarded(|| {
        if out_json.is_null() {
            set_error("null argument");
            return TgdcStatus::NullArgument;
        }
        *out_json = ptr::null_mut();
        let s = match text(program) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let compiled = TwoCounterMachine::parse(s).and_then(|m| compile_2cm(&m));
        match compiled {
            Ok(cm) => match CString::new(write_model(&Model::Delayed(cm.game))) {
                Ok(c) => {
                    *out_json = c.into_raw();
                    TgdcStatus::Ok
                }
                Err(_) => fail(Error::Unsupported("model text contains NUL".into())),
            },
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tgdc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null.
#[no_mangle]
pub extern "C" fn tgdc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn tgdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
