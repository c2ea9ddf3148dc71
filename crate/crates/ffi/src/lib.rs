//! C ABI over the renga engine.
//!
//! Every call returns a [`RengaStatus`]. On anything but `RENGA_STATUS_OK`
//! the thread-local message from [`renga_last_error`] says what went wrong.
//! Strings handed out by the library are NUL-terminated UTF-8 and must be
//! released with [`renga_string_free`]; handles with their own `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use renga::evaluation::score_report;
use renga::generator::{generate_for_topic, prompt_topic, GenConfig, Haiku};
use renga::renga::{split_prompt, RengaError, RengaRuleset};
use renga::{Engine, Error};
use serde_json::{json, Value};

/// Result of every `renga_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RengaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON, ruleset or generation config.
    InvalidArgument = 3,
    Io = 4,
    /// The model directory is stale or corrupt.
    Cache = 5,
    NoVectorCoverage = 6,
    /// A submitted verse broke the form or repetition rules.
    ConstraintViolation = 7,
    SessionComplete = 8,
    /// Generation failed for another reason; see the message.
    Failed = 9,
    Panic = 10,
}

/// Loaded models. Read-only once loaded, so one handle may serve many threads.
pub struct RengaEngine(Engine);

/// A renga in progress. Not thread-safe.
pub struct RengaSession(renga::RengaSession);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RengaStatus, String);

impl Failure {
    fn new(status: RengaStatus, message: impl Into<String>) -> Self {
        Failure(status, message.into())
    }
}

fn status_for(code: &str) -> RengaStatus {
    match code {
        "Io" => RengaStatus::Io,
        "Cache" => RengaStatus::Cache,
        "Json" | "InvalidRuleset" | "InvalidConfig" => RengaStatus::InvalidArgument,
        "NoVectorCoverage" => RengaStatus::NoVectorCoverage,
        "ConstraintViolation" => RengaStatus::ConstraintViolation,
        "SessionComplete" => RengaStatus::SessionComplete,
        _ => RengaStatus::Failed,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_for(e.code()), format!("{}: {e}", e.code()))
    }
}

impl From<RengaError> for Failure {
    fn from(e: RengaError) -> Self {
        Error::from(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new(RengaStatus::InvalidArgument, format!("Json: {e}"))
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RengaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RengaStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let what = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("Panic: {what}"));
            RengaStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(
            RengaStatus::NullArgument,
            format!("{name} is null"),
        ));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(RengaStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(RengaStatus::NullArgument, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut *mut T, name: &str) -> Result<&'a mut *mut T, Failure> {
    let out = p
        .as_mut()
        .ok_or_else(|| Failure::new(RengaStatus::NullArgument, format!("{name} is null")))?;
    *out = ptr::null_mut();
    Ok(out)
}

fn into_c(value: &Value) -> *mut c_char {
    // serde_json escapes control characters, so no interior NULs
    CString::new(value.to_string()).unwrap().into_raw()
}

/// Message for the last failed call on this thread, or NULL after a
/// success. Valid until the next `renga_*` call on the same thread.
#[no_mangle]
pub extern "C" fn renga_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn renga_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a model directory written by `renga build-models`.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn renga_engine_load(
    dir: *const c_char,
    out: *mut *mut RengaEngine,
) -> RengaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dir = str_arg(dir, "dir")?;
        let engine = Engine::load(Path::new(dir))?;
        *out = Box::into_raw(Box::new(RengaEngine(engine)));
        Ok(())
    })
}

/// # Safety
/// `engine` must come from [`renga_engine_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn renga_engine_free(engine: *mut RengaEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Generates a batch of haikus.
///
/// `request` is a JSON object: `prompts` (list of strings, required),
/// `n` (default 10) and any generation settings (`seed`, `beam_width`,
/// `lambda_ngram`, `lambda_topic`, `dither_temperature`). The result is a
/// JSON array of `{lines, syllables, scores}`.
///
/// # Safety
/// Pointers must be valid; `engine` from [`renga_engine_load`].
#[no_mangle]
pub unsafe extern "C" fn renga_generate_json(
    engine: *const RengaEngine,
    request: *const c_char,
    out: *mut *mut c_char,
) -> RengaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let engine = &ref_arg(engine, "engine")?.0;
        let req: Value = serde_json::from_str(str_arg(request, "request")?)?;
        let prompts: Vec<Vec<String>> = match req.get("prompts") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|p| p.as_str().map(split_prompt))
                .collect::<Option<_>>()
                .ok_or_else(|| {
                    Failure::new(RengaStatus::InvalidArgument, "prompts must be strings")
                })?,
            _ => {
                return Err(Failure::new(
                    RengaStatus::InvalidArgument,
                    "prompts must be a list of strings",
                ))
            }
        };
        let n = match req.get("n") {
            None => 10,
            Some(v) => v
                .as_u64()
                .filter(|n| (1..=1000).contains(n))
                .ok_or_else(|| {
                    Failure::new(RengaStatus::InvalidArgument, "n must be between 1 and 1000")
                })? as usize,
        };
        let mut settings = req.clone();
        if let Value::Object(m) = &mut settings {
            m.remove("prompts");
            m.remove("n");
        }
        let cfg: GenConfig = serde_json::from_value(settings)?;
        let topic =
            prompt_topic(&engine.space, &prompts).map_err(|e| Failure::from(Error::from(e)))?;
        let batch = generate_for_topic(&topic, n, engine, &cfg)
            .map_err(|e| Failure::from(Error::from(e)))?;
        let items: Vec<Value> = batch
            .iter()
            .map(|h| {
                json!({
                    "lines": h.line_texts(),
                    "syllables": h.syllables(&engine.lexicon),
                    "scores": score_report(&engine.ngram, &engine.space, &engine.affect, h, &topic),
                })
            })
            .collect();
        *out = into_c(&Value::Array(items));
        Ok(())
    })
}

/// Starts a session from a ruleset in JSON.
///
/// # Safety
/// `ruleset` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn renga_session_new(
    ruleset: *const c_char,
    seed: u64,
    out: *mut *mut RengaSession,
) -> RengaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let rs = RengaRuleset::from_json(str_arg(ruleset, "ruleset")?)?;
        let session = renga::RengaSession::new(rs, seed)?;
        *out = Box::into_raw(Box::new(RengaSession(session)));
        Ok(())
    })
}

/// # Safety
/// `session` must come from [`renga_session_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn renga_session_free(session: *mut RengaSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Lets the machine compose the next link. `out` receives the link as JSON.
///
/// # Safety
/// Pointers must be valid handles from this library.
#[no_mangle]
pub unsafe extern "C" fn renga_session_machine_link(
    session: *mut RengaSession,
    engine: *const RengaEngine,
    out: *mut *mut c_char,
) -> RengaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let engine = &ref_arg(engine, "engine")?.0;
        let session = &mut session
            .as_mut()
            .ok_or_else(|| Failure::new(RengaStatus::NullArgument, "session is null"))?
            .0;
        let link = session.next_link(engine, &GenConfig::default())?;
        *out = into_c(&serde_json::to_value(link)?);
        Ok(())
    })
}

/// Submits a human verse, one line per `\n`.
///
/// On `RENGA_STATUS_CONSTRAINT_VIOLATION` the session is unchanged and
/// `out` holds a JSON array of violations; on success it holds the link.
///
/// # Safety
/// Pointers must be valid handles from this library.
#[no_mangle]
pub unsafe extern "C" fn renga_session_submit(
    session: *mut RengaSession,
    engine: *const RengaEngine,
    verse: *const c_char,
    out: *mut *mut c_char,
) -> RengaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let engine = &ref_arg(engine, "engine")?.0;
        let verse = str_arg(verse, "verse")?;
        let session = &mut session
            .as_mut()
            .ok_or_else(|| Failure::new(RengaStatus::NullArgument, "session is null"))?
            .0;
        match session.submit_link(Haiku::parse(verse), engine) {
            Ok(link) => {
                *out = into_c(&serde_json::to_value(link)?);
                Ok(())
            }
            Err(RengaError::Rejected(violations)) => {
                *out = into_c(&serde_json::to_value(&violations)?);
                Err(RengaError::Rejected(violations).into())
            }
            Err(e) => Err(e.into()),
        }
    })
}

/// Full session state as JSON: ruleset, seed, status and links.
///
/// # Safety
/// Pointers must be valid; `session` from [`renga_session_new`].
#[no_mangle]
pub unsafe extern "C" fn renga_session_state_json(
    session: *const RengaSession,
    out: *mut *mut c_char,
) -> RengaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let session = &ref_arg(session, "session")?.0;
        *out = into_c(&serde_json::to_value(session)?);
        Ok(())
    })
}
