//! C ABI for `balcov`.
//!
//! Objects cross the boundary as opaque handles created by `bc_*_new`-style
//! constructors and released by the matching `*_free`. Every fallible call
//! returns a [`BcStatus`]; on failure a message is available from
//! [`bc_last_error_message`] on the same thread until the next call.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with [`bc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use balcov::degree::CoverSpec;
use balcov::{balanced, degree, simplicial, BalancedProfile, Error, OrientedTriangulation, PointConfig};

/// Result codes; the nonzero values match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcStatus {
    Ok = 0,
    NullPointer = 1,
    InputError = 2,
    ResourceError = 3,
    TheoremViolation = 4,
    Panic = 5,
}

/// A point configuration `(V, r)`.
pub struct BcConfig {
    inner: PointConfig,
}

/// The minimal balanced subsets of a configuration.
pub struct BcProfile {
    inner: BalancedProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> BcStatus {
    match err.exit_code() {
        3 => BcStatus::ResourceError,
        4 => BcStatus::TheoremViolation,
        _ => BcStatus::InputError,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (BcStatus, String)>) -> BcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BcStatus::Panic
        }
    }
}

fn lift(err: Error) -> (BcStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (BcStatus, String) {
    (BcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (BcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (BcStatus::InputError, format!("{what} is not UTF-8")))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, (BcStatus, String)> {
    serde_json::from_str(text).map_err(|e| (BcStatus::InputError, format!("{what}: {e}")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (BcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s)
        .map_err(|_| (BcStatus::InputError, "output contains NUL".to_string()))?
        .into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next `bc_*` call on this thread.
#[no_mangle]
pub extern "C" fn bc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a configuration from JSON `{"dim", "points", "r"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_config_from_json(json: *const c_char, out: *mut *mut BcConfig) -> BcStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner: PointConfig = parse(text, "config")?;
        *out = Box::into_raw(Box::new(BcConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `config` must come from [`bc_config_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bc_config_free(config: *mut BcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Number of points, or 0 for NULL.
///
/// # Safety
/// `config` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bc_config_len(config: *const BcConfig) -> usize {
    config.as_ref().map_or(0, |c| c.inner.len())
}

/// Enumerates the minimal balanced subsets.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_profile_compute(config: *const BcConfig, out: *mut *mut BcProfile) -> BcStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = balanced::enumerate_minimal_balanced(&cfg.inner).map_err(lift)?;
        *out = Box::into_raw(Box::new(BcProfile { inner }));
        Ok(())
    })
}

/// # Safety
/// `profile` must come from [`bc_profile_compute`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bc_profile_free(profile: *mut BcProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Number of minimal balanced subsets, or 0 for NULL.
///
/// # Safety
/// `profile` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bc_profile_count(profile: *const BcProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.inner.minimal_balanced().len())
}

/// Whether the subset given by 1-based `indices` is balanced.
///
/// # Safety
/// `indices` must point to `len` readable values (or be NULL with `len == 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_profile_is_balanced(
    profile: *const BcProfile,
    indices: *const usize,
    len: usize,
    out: *mut bool,
) -> BcStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ids: &[usize] = if len == 0 {
            &[]
        } else if indices.is_null() {
            return Err(null("indices"));
        } else {
            std::slice::from_raw_parts(indices, len)
        };
        let zero = ids
            .iter()
            .map(|&i| {
                i.checked_sub(1)
                    .ok_or((BcStatus::InputError, "indices are 1-based".to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        *out = p.inner.is_balanced(&zero).map_err(lift)?;
        Ok(())
    })
}

/// Reduced homology of the non-balanced complex as a JSON array of
/// `{"degree", "betti", "torsion"}` records.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_homology_json(config: *const BcConfig, out: *mut *mut c_char) -> BcStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let complex = balanced::nonbalanced_complex(&cfg.inner).map_err(lift)?;
        let h = simplicial::reduced_homology(&complex).map_err(lift)?;
        write_string(out, serde_json::to_string(&h.groups).expect("serializable"))
    })
}

/// Degree of a cover on a closed oriented triangulation, as the same JSON
/// object the `degree` command prints under `result`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bc_degree_json(
    config: *const BcConfig,
    triangulation_json: *const c_char,
    cover_json: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> BcStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let tri: OrientedTriangulation = parse(read_str(triangulation_json, "triangulation")?, "triangulation")?;
        let spec: CoverSpec = parse(read_str(cover_json, "cover")?, "cover")?;
        let cover = spec.into_cover(cfg.inner.len()).map_err(lift)?;
        let result = degree::degree(&tri, &cover, &cfg.inner, seed).map_err(lift)?;
        write_string(out, result.to_json().to_string())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
