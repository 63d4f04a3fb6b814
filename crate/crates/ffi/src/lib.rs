//! C ABI over the kinetree pipeline.
//!
//! Conventions:
//! - Objects returned by `kt_*_new`/`kt_run_*` are opaque handles freed by
//!   their matching `kt_*_free`.
//! - Strings returned by the library are NUL-terminated, UTF-8, and must be
//!   freed with `kt_string_free`. Caller-owned strings are never freed here.
//! - Functions return `KtStatus` (or NULL for pointer returns) on failure;
//!   `kt_last_error` fetches a thread-local message for the last failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};

use kinetree::pipeline::{run_pipeline, PipelineConfig, PipelineError, PipelineOutput};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let cstring = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

/// Status codes returned by fallible entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KtStatus {
    Ok = 0,
    /// Bad arguments: NULL pointers, non-UTF-8 strings.
    InvalidArgument = 1,
    /// Manifest or configuration rejected.
    InvalidInput = 2,
    /// A pipeline stage failed.
    StageFailure = 3,
}

/// Opaque result of one pipeline run.
pub struct KtPipelineResult {
    output: PipelineOutput,
    urdf_path: CString,
    tree_json: CString,
    metrics_json: Option<CString>,
}

fn path_from_c(ptr: *const c_char) -> Result<PathBuf, KtStatus> {
    if ptr.is_null() {
        set_last_error("NULL path argument".into());
        return Err(KtStatus::InvalidArgument);
    }
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_last_error("path is not valid UTF-8".into());
        KtStatus::InvalidArgument
    })?;
    Ok(PathBuf::from(s))
}

fn status_of(err: &PipelineError) -> KtStatus {
    if err.is_invalid_input() {
        KtStatus::InvalidInput
    } else {
        KtStatus::StageFailure
    }
}

/// Library version as a malloc'd string; free with `kt_string_free`.
#[no_mangle]
pub extern "C" fn kt_version() -> *mut c_char {
    CString::new(env!("CARGO_PKG_VERSION"))
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Free a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must have been returned by a `kt_*` function and not freed before.
#[no_mangle]
pub unsafe extern "C" fn kt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread; free with
/// `kt_string_free`. NULL when no failure has been recorded.
#[no_mangle]
pub extern "C" fn kt_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|msg| msg.clone().into_raw())
            .unwrap_or(std::ptr::null_mut())
    })
}

fn run(
    manifest_path: &Path,
    config_json: Option<&str>,
    out_dir: &Path,
) -> Result<Box<KtPipelineResult>, (KtStatus, String)> {
    let config: PipelineConfig = match config_json {
        Some(text) if !text.trim().is_empty() => serde_json::from_str(text)
            .map_err(|e| (KtStatus::InvalidInput, format!("config: {e}")))?,
        _ => PipelineConfig::default(),
    };
    let output = run_pipeline(manifest_path, &config, out_dir)
        .map_err(|e| (status_of(&e), e.to_string()))?;

    let urdf_path = CString::new(output.urdf_path.display().to_string())
        .map_err(|_| (KtStatus::StageFailure, "urdf path contains NUL".into()))?;
    let tree_json = CString::new(
        kinetree::topology::TreeDump::from_tree(&output.tree, Some(output.breakdown))
            .to_json_string(),
    )
    .map_err(|_| (KtStatus::StageFailure, "tree json contains NUL".into()))?;
    let metrics_json = match &output.metrics {
        Some(report) => Some(
            CString::new(serde_json::to_string_pretty(report).unwrap_or_default())
                .map_err(|_| (KtStatus::StageFailure, "metrics json contains NUL".into()))?,
        ),
        None => None,
    };
    Ok(Box::new(KtPipelineResult {
        output,
        urdf_path,
        tree_json,
        metrics_json,
    }))
}

/// Run the full pipeline on a manifest file.
///
/// `config_json` may be NULL or empty for defaults; otherwise it must be the
/// JSON configuration document. On success writes artifacts under `out_dir`
/// and stores a result handle in `*result`; the caller frees it with
/// `kt_result_free`.
///
/// # Safety
/// `manifest_path` and `out_dir` must be valid NUL-terminated strings;
/// `result` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kt_run_pipeline(
    manifest_path: *const c_char,
    config_json: *const c_char,
    out_dir: *const c_char,
    result: *mut *mut KtPipelineResult,
) -> KtStatus {
    if result.is_null() {
        set_last_error("NULL result out-pointer".into());
        return KtStatus::InvalidArgument;
    }
    *result = std::ptr::null_mut();
    let manifest = match path_from_c(manifest_path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let out = match path_from_c(out_dir) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let config = if config_json.is_null() {
        None
    } else {
        match CStr::from_ptr(config_json).to_str() {
            Ok(s) => Some(s),
            Err(_) => {
                set_last_error("config is not valid UTF-8".into());
                return KtStatus::InvalidArgument;
            }
        }
    };
    // Panics must not unwind across the C boundary.
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        run(&manifest, config, &out)
    }));
    match outcome {
        Ok(Ok(boxed)) => {
            *result = Box::into_raw(boxed);
            KtStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal panic".to_string());
            set_last_error(format!("panic: {message}"));
            KtStatus::StageFailure
        }
    }
}

/// Free a pipeline result handle. NULL is a no-op.
///
/// # Safety
/// `result` must come from `kt_run_pipeline` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kt_result_free(result: *mut KtPipelineResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Borrowed pointer to the written URDF path; valid until the result is
/// freed. Do NOT pass to `kt_string_free`.
///
/// # Safety
/// `result` must be a live handle from `kt_run_pipeline`.
#[no_mangle]
pub unsafe extern "C" fn kt_result_urdf_path(result: *const KtPipelineResult) -> *const c_char {
    if result.is_null() {
        return std::ptr::null();
    }
    (*result).urdf_path.as_ptr()
}

/// Borrowed pointer to the tree dump JSON; valid until the result is freed.
///
/// # Safety
/// `result` must be a live handle from `kt_run_pipeline`.
#[no_mangle]
pub unsafe extern "C" fn kt_result_tree_json(result: *const KtPipelineResult) -> *const c_char {
    if result.is_null() {
        return std::ptr::null();
    }
    (*result).tree_json.as_ptr()
}

/// Borrowed pointer to the metrics JSON, or NULL when the manifest carried
/// no ground truth; valid until the result is freed.
///
/// # Safety
/// `result` must be a live handle from `kt_run_pipeline`.
#[no_mangle]
pub unsafe extern "C" fn kt_result_metrics_json(result: *const KtPipelineResult) -> *const c_char {
    if result.is_null() {
        return std::ptr::null();
    }
    match &(*result).metrics_json {
        Some(s) => s.as_ptr(),
        None => std::ptr::null(),
    }
}

/// Number of edges in the inferred tree.
///
/// # Safety
/// `result` must be a live handle from `kt_run_pipeline`.
#[no_mangle]
pub unsafe extern "C" fn kt_result_edge_count(result: *const KtPipelineResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).output.tree.edges.len()
}

/// Root part id of the inferred tree.
///
/// # Safety
/// `result` must be a live handle from `kt_run_pipeline`.
#[no_mangle]
pub unsafe extern "C" fn kt_result_root(result: *const KtPipelineResult) -> usize {
    if result.is_null() {
        return usize::MAX;
    }
    (*result).output.tree.root
}

/// Generate a synthetic ground-truth fixture (template by name: chain,
/// star, multi-branch, symmetric-legs, door, drawer) under `out_dir` and
/// return the manifest path as a malloc'd string (free with
/// `kt_string_free`), or NULL on failure.
///
/// # Safety
/// `template` and `out_dir` must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn kt_generate_fixture(
    template: *const c_char,
    seed: u64,
    out_dir: *const c_char,
) -> *mut c_char {
    let parse = || -> Result<PathBuf, String> {
        let template = CStr::from_ptr(template)
            .to_str()
            .map_err(|_| "template is not valid UTF-8".to_string())?;
        let out = CStr::from_ptr(out_dir)
            .to_str()
            .map_err(|_| "out_dir is not valid UTF-8".to_string())?;
        let template: kinetree::eval::Template = template.parse()?;
        let assembly = kinetree::eval::generate_synthetic(template, seed);
        kinetree::eval::write_synthetic(&assembly, Path::new(out)).map_err(|e| e.to_string())
    };
    if template.is_null() || out_dir.is_null() {
        set_last_error("NULL argument".into());
        return std::ptr::null_mut();
    }
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(parse)) {
        Ok(Ok(path)) => CString::new(path.display().to_string())
            .map(CString::into_raw)
            .unwrap_or(std::ptr::null_mut()),
        Ok(Err(message)) => {
            set_last_error(message);
            std::ptr::null_mut()
        }
        Err(_) => {
            set_last_error("panic during fixture generation".into());
            std::ptr::null_mut()
        }
    }
}
