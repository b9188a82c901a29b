//! C ABI for langlogic.
//!
//! Languages are opaque handles created by [`lnl_language_parse`] and
//! released with [`lnl_language_free`]. Every fallible call returns an
//! [`LnlStatus`]; on failure a description is available from
//! [`lnl_last_error`] on the same thread. Results are UTF-8 JSON strings
//! owned by the caller and released with [`lnl_string_free`].

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use langlogic::assertion::{atoms_of, parse_assertion, Assertion};
use langlogic::prover::{check_derivation_detailed, prove, saturate, ProofNode, ProofResult, ProverConfig};
use langlogic::syntax::{parse_language_unchecked, render_language, validate_language, LanguageDef};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LnlStatus {
    Ok = 0,
    /// The language definition has validation findings.
    Validation = 1,
    /// Malformed language text, assertion or derivation JSON.
    Parse = 2,
    /// The goal is not derivable; the output holds the failure report.
    NoProof = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    /// An option is out of range or names an unknown metavariable.
    InvalidArgument = 6,
    /// A panic was caught at the boundary.
    Internal = 7,
}

/// A parsed language definition.
pub struct LnlLanguage {
    def: LanguageDef,
}

/// Prover options. A null pointer means defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LnlOptions {
    /// Maximum passes over the inference rules; 0 means the default bound.
    pub max_passes: u32,
    /// Comma-separated metavariables replacing the file's `%ineffectual`
    /// directive, or null to keep it.
    pub ineffectual: *const c_char,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LnlStatus, String);

type Outcome<T> = Result<T, Failure>;

fn fail<T>(status: LnlStatus, msg: impl Into<String>) -> Outcome<T> {
    Err(Failure(status, msg.into()))
}

fn set_last_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("NULs removed"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, records its error message and maps panics to `Internal`.
fn guard(f: impl FnOnce() -> Outcome<LnlStatus>) -> LnlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            set_last_error(match status {
                LnlStatus::Validation => Some("the language has validation findings".into()),
                LnlStatus::NoProof => Some("no proof found".into()),
                _ => None,
            });
            status
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(Some(msg));
            status
        }
        Err(_) => {
            set_last_error(Some("internal error: panic caught at the C boundary".into()));
            LnlStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return fail(LnlStatus::NullArgument, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(LnlStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Outcome<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn language<'a>(p: *const LnlLanguage) -> Outcome<&'a LanguageDef> {
    match p.as_ref() {
        Some(l) => Ok(&l.def),
        None => fail(LnlStatus::NullArgument, "language handle is null"),
    }
}

unsafe fn write_out(out: *mut *mut c_char, s: String) -> Outcome<()> {
    let c = CString::new(s).or_else(|_| fail(LnlStatus::Internal, "output contains a NUL byte"))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut *mut T) -> Outcome<()> {
    if out.is_null() {
        fail(LnlStatus::NullArgument, "output pointer is null")
    } else {
        Ok(())
    }
}

fn valid(lang: &LanguageDef) -> Outcome<()> {
    let report = validate_language(lang);
    if report.is_empty() {
        Ok(())
    } else {
        fail(LnlStatus::Validation, report.to_string())
    }
}

fn assertion(src: Option<&str>, what: &str) -> Outcome<Assertion> {
    let Some(src) = src else {
        return Ok(Assertion::True);
    };
    let a = parse_assertion(src).or_else(|e| fail(LnlStatus::Parse, format!("{what}: {e}")))?;
    atoms_of(&a).or_else(|e| fail(LnlStatus::Parse, format!("{what}: {e}")))?;
    Ok(a)
}

unsafe fn config(opts: *const LnlOptions) -> Outcome<ProverConfig> {
    let Some(opts) = opts.as_ref() else {
        return Ok(ProverConfig::default());
    };
    let ineffectual = optional_text(opts.ineffectual, "ineffectual")?.map(|list| {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect::<BTreeSet<_>>()
    });
    Ok(ProverConfig {
        max_passes: (opts.max_passes > 0).then_some(opts.max_passes as usize),
        ineffectual,
    })
}

fn prover_error(e: langlogic::Error) -> Failure {
    let status = match e {
        langlogic::Error::Config(_) => LnlStatus::InvalidArgument,
        langlogic::Error::Validation(_) => LnlStatus::Validation,
        _ => LnlStatus::Parse,
    };
    Failure(status, e.to_string())
}

fn json(value: &impl serde::Serialize) -> Outcome<String> {
    serde_json::to_string(value).or_else(|e| fail(LnlStatus::Internal, e.to_string()))
}

/// Parses a `.lan` document. Validation is deferred to
/// [`lnl_language_validate`]; analyses refuse invalid languages.
///
/// # Safety
/// `source` must be null or a NUL-terminated string; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lnl_language_parse(source: *const c_char, out: *mut *mut LnlLanguage) -> LnlStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let src = text(source, "source")?;
        let def = parse_language_unchecked(src).or_else(|e| fail(LnlStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(LnlLanguage { def }));
        Ok(LnlStatus::Ok)
    })
}

/// Releases a language handle. Null is ignored.
///
/// # Safety
/// `lang` must be null or a handle from [`lnl_language_parse`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn lnl_language_free(lang: *mut LnlLanguage) {
    if !lang.is_null() {
        drop(Box::from_raw(lang));
    }
}

/// Writes `{"valid": bool, "findings": [string]}` to `out`. Returns
/// `Validation` when there are findings.
///
/// # Safety
/// `lang` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lnl_language_validate(lang: *const LnlLanguage, out: *mut *mut c_char) -> LnlStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let lang = language(lang)?;
        let report = validate_language(lang);
        let findings: Vec<String> = report.findings.iter().map(ToString::to_string).collect();
        write_out(
            out,
            json(&serde_json::json!({ "valid": report.is_empty(), "findings": findings }))?,
        )?;
        Ok(if report.is_empty() {
            LnlStatus::Ok
        } else {
            LnlStatus::Validation
        })
    })
}

/// Writes the language back out in `.lan` syntax.
///
/// # Safety
/// `lang` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lnl_language_render(lang: *const LnlLanguage, out: *mut *mut c_char) -> LnlStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        write_out(out, render_language(language(lang)?))?;
        Ok(LnlStatus::Ok)
    })
}

/// Saturates from `pre` (null means `true`) and writes `{"atoms": [...]}`.
///
/// # Safety
/// `lang` must be a live handle; `pre` null or a NUL-terminated string;
/// `opts` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lnl_derive(
    lang: *const LnlLanguage,
    pre: *const c_char,
    opts: *const LnlOptions,
    out: *mut *mut c_char,
) -> LnlStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let lang = language(lang)?;
        valid(lang)?;
        let pre = assertion(optional_text(pre, "precondition")?, "precondition")?;
        let sat = saturate(lang, &pre, &config(opts)?).map_err(prover_error)?;
        let atoms: Vec<_> = sat.atoms.iter().collect();
        write_out(out, json(&serde_json::json!({ "atoms": atoms }))?)?;
        Ok(LnlStatus::Ok)
    })
}

/// Proves `goal` from `pre` (null means `true`). Writes the derivation tree
/// as JSON and returns `Ok`, or writes the failure report and returns
/// `NoProof`.
///
/// # Safety
/// As for [`lnl_derive`]; `goal` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lnl_prove(
    lang: *const LnlLanguage,
    pre: *const c_char,
    goal: *const c_char,
    opts: *const LnlOptions,
    out: *mut *mut c_char,
) -> LnlStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let lang = language(lang)?;
        valid(lang)?;
        let pre = assertion(optional_text(pre, "precondition")?, "precondition")?;
        let goal = assertion(Some(text(goal, "goal")?), "goal")?;
        match prove(lang, &pre, &goal, &config(opts)?).map_err(prover_error)? {
            ProofResult::Proved(tree) => {
                write_out(out, json(&tree)?)?;
                Ok(LnlStatus::Ok)
            }
            ProofResult::NoProof(report) => {
                write_out(out, json(&report)?)?;
                Ok(LnlStatus::NoProof)
            }
        }
    })
}

/// Checks a derivation tree given as JSON. `valid` receives 1 when the tree
/// is a correct derivation about `lang`, else 0; the reason for rejection is
/// available from [`lnl_last_error`].
///
/// # Safety
/// `lang` must be a live handle; `tree_json` a NUL-terminated string;
/// `valid` writable.
#[no_mangle]
pub unsafe extern "C" fn lnl_check_derivation(
    lang: *const LnlLanguage,
    tree_json: *const c_char,
    valid: *mut i32,
) -> LnlStatus {
    let mut reason = None;
    let status = guard(|| {
        if valid.is_null() {
            return fail(LnlStatus::NullArgument, "output pointer is null");
        }
        *valid = 0;
        let lang = language(lang)?;
        let tree: ProofNode =
            serde_json::from_str(text(tree_json, "tree")?).or_else(|e| fail(LnlStatus::Parse, format!("tree: {e}")))?;
        match check_derivation_detailed(lang, &tree) {
            Ok(()) => *valid = 1,
            Err(e) => reason = Some(e.to_string()),
        }
        Ok(LnlStatus::Ok)
    });
    if reason.is_some() {
        set_last_error(reason);
    }
    status
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn lnl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Description of the last failure on this thread, or null after a
/// successful call. Valid until the next call into the library on this
/// thread.
#[no_mangle]
pub extern "C" fn lnl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
