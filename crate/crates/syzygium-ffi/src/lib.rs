//! C ABI for the syzygium library: opaque handles, integer status codes and
//! JSON strings for structured results.
//!
//! Conventions:
//! - constructors return an owned opaque pointer or NULL on failure;
//! - predicate calls return 1 (yes), 0 (no) or a negative error code;
//! - every returned `char*` is owned by the caller and must be released
//!   with `syzygium_string_free`;
//! - after any failure, `syzygium_last_error` returns a thread-local
//!   message valid until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use syzygium::bundle::BundleSpec;
use syzygium::certificate::Certificate;
use syzygium::curve::{PlaneCurve, SmoothnessResult, Var};
use syzygium::field::Field;
use syzygium::poly::parse_poly;

pub const SYZYGIUM_OK: i32 = 0;
pub const SYZYGIUM_ERR: i32 = -1;
pub const SYZYGIUM_ERR_NULL: i32 = -2;
pub const SYZYGIUM_ERR_UTF8: i32 = -3;
pub const SYZYGIUM_ERR_PANIC: i32 = -4;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Thread-local message for the most recent failure; NULL when the last
/// call succeeded. The pointer stays valid until the next API call on the
/// same thread; do not free it.
#[no_mangle]
pub extern "C" fn syzygium_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a `syzygium_*` call that
/// documents caller ownership, and must not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn syzygium_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(SYZYGIUM_ERR_NULL);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        SYZYGIUM_ERR_UTF8
    })
}

fn out_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(|c| c.into_raw())
        .unwrap_or(std::ptr::null_mut())
}

fn guarded<T>(f: impl FnOnce() -> Result<T, String>, err: T) -> T {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            clear_error();
            v
        }
        Ok(Err(msg)) => {
            set_error(msg);
            err
        }
        Err(_) => {
            set_error("internal panic");
            err
        }
    }
}

/// Opaque coefficient-field handle.
pub struct SyzField(Arc<Field>);
/// Opaque plane-curve handle.
pub struct SyzCurve(Arc<PlaneCurve>);
/// Opaque syzygy-bundle handle.
pub struct SyzBundle(BundleSpec);

/// Parse a field descriptor such as `GF(2)`, `GF(3)(t)` or
/// `GF(4)=GF(2)[a]/(a^2+a+1)`. Returns NULL on failure.
///
/// # Safety
/// `descriptor` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn syzygium_field_parse(descriptor: *const c_char) -> *mut SyzField {
    let Ok(desc) = cstr(descriptor) else {
        return std::ptr::null_mut();
    };
    guarded(
        || {
            Field::parse(desc)
                .map(|f| Box::into_raw(Box::new(SyzField(f))))
                .map_err(|e| e.to_string())
        },
        std::ptr::null_mut(),
    )
}

/// Canonical descriptor text of a field handle (caller frees).
///
/// # Safety
/// `field` must be a live handle from `syzygium_field_parse`.
#[no_mangle]
pub unsafe extern "C" fn syzygium_field_descriptor(field: *const SyzField) -> *mut c_char {
    if field.is_null() {
        set_error("null field handle");
        return std::ptr::null_mut();
    }
    let f = &(*field).0;
    clear_error();
    out_string(f.descriptor())
}

/// # Safety
/// `field` must be a live handle; it is invalid after this call.
#[no_mangle]
pub unsafe extern "C" fn syzygium_field_free(field: *mut SyzField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Build a plane curve from a field descriptor, an equation and a cover
/// pair such as `"x"`, `"z"`. Returns NULL on failure.
///
/// # Safety
/// All pointers must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn syzygium_curve_new(
    field: *const c_char,
    equation: *const c_char,
    cover_u: *const c_char,
    cover_v: *const c_char,
) -> *mut SyzCurve {
    let (Ok(fd), Ok(eq), Ok(u), Ok(v)) = (cstr(field), cstr(equation), cstr(cover_u), cstr(cover_v))
    else {
        return std::ptr::null_mut();
    };
    guarded(
        || {
            let f = Field::parse(fd).map_err(|e| e.to_string())?;
            let p = parse_poly(eq, &f).map_err(|e| e.to_string())?;
            let cu = Var::parse(u).map_err(|e| e.to_string())?;
            let cv = Var::parse(v).map_err(|e| e.to_string())?;
            PlaneCurve::new(p, (cu, cv))
                .map(|c| Box::into_raw(Box::new(SyzCurve(c))))
                .map_err(|e| e.to_string())
        },
        std::ptr::null_mut(),
    )
}

/// # Safety
/// `curve` must be a live handle; it is invalid after this call.
#[no_mangle]
pub unsafe extern "C" fn syzygium_curve_free(curve: *mut SyzCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Genus `(d-1)(d-2)/2` of the curve; negative on error.
///
/// # Safety
/// `curve` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn syzygium_curve_genus(curve: *const SyzCurve) -> i64 {
    if curve.is_null() {
        set_error("null curve handle");
        return SYZYGIUM_ERR_NULL as i64;
    }
    clear_error();
    (*curve).0.genus() as i64
}

/// Saturation smoothness check. Returns 1 (smooth, `*exponent_out` set),
/// 0 (inconclusive) or a negative error code. `n_max = 0` uses the default
/// bound.
///
/// # Safety
/// `curve` must be a live handle; `exponent_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn syzygium_curve_smooth(
    curve: *const SyzCurve,
    n_max: u32,
    exponent_out: *mut u32,
) -> i32 {
    if curve.is_null() {
        set_error("null curve handle");
        return SYZYGIUM_ERR_NULL;
    }
    let c = &(*curve).0;
    let bound = if n_max == 0 { None } else { Some(n_max) };
    guarded(
        || match c.smoothness_check(bound) {
            SmoothnessResult::Smooth { exponent, .. } => {
                if !exponent_out.is_null() {
                    *exponent_out = exponent;
                }
                Ok(1)
            }
            SmoothnessResult::Inconclusive { .. } => Ok(0),
        },
        SYZYGIUM_ERR_PANIC,
    )
}

/// Build `Syz(generators)(twist)`; `generators` is a semicolon-separated
/// list of polynomial texts. Returns NULL on failure (for instance when the
/// generators share a zero on the curve).
///
/// # Safety
/// `curve` must be a live handle, `generators` a valid string.
#[no_mangle]
pub unsafe extern "C" fn syzygium_bundle_new(
    curve: *const SyzCurve,
    generators: *const c_char,
    twist: i64,
) -> *mut SyzBundle {
    if curve.is_null() {
        set_error("null curve handle");
        return std::ptr::null_mut();
    }
    let Ok(gens) = cstr(generators) else {
        return std::ptr::null_mut();
    };
    let c = (*curve).0.clone();
    guarded(
        || {
            let field = c.field().clone();
            let mut parsed = Vec::new();
            for part in gens.split(';').map(|s| s.trim()).filter(|s| !s.is_empty()) {
                parsed.push(c.element(&parse_poly(part, &field).map_err(|e| e.to_string())?));
            }
            BundleSpec::new(c.clone(), parsed, twist)
                .map(|b| Box::into_raw(Box::new(SyzBundle(b))))
                .map_err(|e| e.to_string())
        },
        std::ptr::null_mut(),
    )
}

/// # Safety
/// `bundle` must be a live handle; it is invalid after this call.
#[no_mangle]
pub unsafe extern "C" fn syzygium_bundle_free(bundle: *mut SyzBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}

/// New handle for the e-th Frobenius pullback.
///
/// # Safety
/// `bundle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn syzygium_bundle_pullback(
    bundle: *const SyzBundle,
    e: u32,
) -> *mut SyzBundle {
    if bundle.is_null() {
        set_error("null bundle handle");
        return std::ptr::null_mut();
    }
    let b = &(*bundle).0;
    guarded(
        || Ok(Box::into_raw(Box::new(SyzBundle(b.pullback(e))))),
        std::ptr::null_mut(),
    )
}

/// Dimension of the space of syzygies of the given total degree; negative
/// on error.
///
/// # Safety
/// `bundle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn syzygium_bundle_sections_dim(
    bundle: *const SyzBundle,
    degree: u32,
) -> i64 {
    if bundle.is_null() {
        set_error("null bundle handle");
        return SYZYGIUM_ERR_NULL as i64;
    }
    let b = &(*bundle).0;
    guarded(|| Ok(b.sections_dim(degree) as i64), SYZYGIUM_ERR_PANIC as i64)
}

/// Check a semicolon-separated candidate tuple: 1 verified, 0 not a syzygy,
/// negative on error.
///
/// # Safety
/// `bundle` must be a live handle, `candidate` a valid string.
#[no_mangle]
pub unsafe extern "C" fn syzygium_bundle_verify_syzygy(
    bundle: *const SyzBundle,
    candidate: *const c_char,
) -> i32 {
    if bundle.is_null() {
        set_error("null bundle handle");
        return SYZYGIUM_ERR_NULL;
    }
    let Ok(cand) = cstr(candidate) else {
        return SYZYGIUM_ERR_UTF8;
    };
    let b = &(*bundle).0;
    guarded(
        || {
            let parts: Vec<&str> = cand.split(';').map(|s| s.trim()).collect();
            let s = b
                .section_from_texts(&parts, None)
                .map_err(|e| e.to_string())?;
            Ok(b.verify_syzygy(&s.components).map_err(|e| e.to_string())? as i32)
        },
        SYZYGIUM_ERR,
    )
}

/// Search a trivializing frame of the e-th pullback; returns the JSON
/// certificate (caller frees) or NULL when no frame is found or on error
/// (distinguish via `syzygium_last_error`).
///
/// # Safety
/// `bundle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn syzygium_bundle_trivialize(
    bundle: *const SyzBundle,
    e: u32,
) -> *mut c_char {
    if bundle.is_null() {
        set_error("null bundle handle");
        return std::ptr::null_mut();
    }
    let b = &(*bundle).0;
    guarded(
        || match b.triviality_certificate(e).map_err(|e| e.to_string())? {
            Some(cert) => {
                let file = Certificate::from(&cert);
                Ok(out_string(file.to_json().map_err(|e| e.to_string())?))
            }
            None => Ok(std::ptr::null_mut()),
        },
        std::ptr::null_mut(),
    )
}

/// Hasse-Witt matrix of the curve as a JSON object (caller frees).
///
/// # Safety
/// `curve` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn syzygium_hasse_witt_json(curve: *const SyzCurve) -> *mut c_char {
    if curve.is_null() {
        set_error("null curve handle");
        return std::ptr::null_mut();
    }
    let c = (*curve).0.clone();
    guarded(
        || {
            let hw = syzygium::cech::hasse_witt(&c).map_err(|e| e.to_string())?;
            let field = c.field().clone();
            let rows: Vec<Vec<String>> = (0..hw.dim())
                .map(|i| {
                    (0..hw.dim())
                        .map(|j| field.elem_to_string(hw.matrix.at(i, j)))
                        .collect()
                })
                .collect();
            let v = serde_json::json!({ "dim": hw.dim(), "rows": rows });
            Ok(out_string(v.to_string()))
        },
        std::ptr::null_mut(),
    )
}

/// Run a scenario by name with integer parameters passed as a JSON object,
/// e.g. `{"n": 2, "l": 0}`. Returns the report JSON (caller frees).
///
/// # Safety
/// Both pointers must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn syzygium_scenario_run_json(
    name: *const c_char,
    params_json: *const c_char,
) -> *mut c_char {
    let (Ok(name), Ok(params)) = (cstr(name), cstr(params_json)) else {
        return std::ptr::null_mut();
    };
    guarded(
        || {
            let map: std::collections::BTreeMap<String, i64> = if params.trim().is_empty() {
                Default::default()
            } else {
                serde_json::from_str(params).map_err(|e| e.to_string())?
            };
            let report = syzygium::scenario::scenario_run(name, &map).map_err(|e| e.to_string())?;
            Ok(out_string(report.to_json().map_err(|e| e.to_string())?))
        },
        std::ptr::null_mut(),
    )
}

/// Re-verify a certificate JSON: 1 accepted, 0 rejected, negative on error.
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn syzygium_check_certificate(json: *const c_char) -> i32 {
    let Ok(text) = cstr(json) else {
        return SYZYGIUM_ERR_UTF8;
    };
    guarded(
        || {
            let cert = Certificate::from_json(text).map_err(|e| e.to_string())?;
            match cert.check() {
                Ok(_) => Ok(1),
                Err(e) => {
                    set_error(e.to_string());
                    Ok(0)
                }
            }
        },
        SYZYGIUM_ERR,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn field_and_curve_round_trip() {
        unsafe {
            let f = syzygium_field_parse(c("GF(3)(t)").as_ptr());
            assert!(!f.is_null());
            let d = syzygium_field_descriptor(f);
            assert_eq!(CStr::from_ptr(d).to_str().unwrap(), "GF(3)(t)");
            syzygium_string_free(d);
            syzygium_field_free(f);

            let bad = syzygium_field_parse(c("GF(4)").as_ptr());
            assert!(bad.is_null());
            assert!(!syzygium_last_error().is_null());
        }
    }

    #[test]
    fn bundle_pipeline_over_c_abi() {
        unsafe {
            let curve = syzygium_curve_new(
                c("GF(3)").as_ptr(),
                c("x^5+y^5+z^5").as_ptr(),
                c("x").as_ptr(),
                c("z").as_ptr(),
            );
            assert!(!curve.is_null());
            assert_eq!(syzygium_curve_genus(curve), 6);
            let mut n = 0u32;
            assert_eq!(syzygium_curve_smooth(curve, 0, &mut n), 1);

            let bundle = syzygium_bundle_new(curve, c("x^6;y^6;z^6").as_ptr(), 8);
            assert!(!bundle.is_null());
            assert_eq!(
                syzygium_bundle_verify_syzygy(bundle, c("z*y;x*z;x*y").as_ptr()),
                1
            );
            assert_eq!(
                syzygium_bundle_verify_syzygy(bundle, c("x;y;z").as_ptr()),
                0
            );
            let pb = syzygium_bundle_pullback(bundle, 1);
            assert!(!pb.is_null());
            syzygium_bundle_free(pb);
            syzygium_bundle_free(bundle);
            syzygium_curve_free(curve);
        }
    }

    #[test]
    fn trivialize_and_check_over_c_abi() {
        unsafe {
            let curve = syzygium_curve_new(
                c("GF(2)").as_ptr(),
                c("x^5+y^5+z^5").as_ptr(),
                c("x").as_ptr(),
                c("z").as_ptr(),
            );
            let bundle = syzygium_bundle_new(curve, c("x^2;y^2;x*y").as_ptr(), 3);
            let cert = syzygium_bundle_trivialize(bundle, 0);
            assert!(!cert.is_null());
            assert_eq!(syzygium_check_certificate(cert), 1);
            syzygium_string_free(cert);
            syzygium_bundle_free(bundle);
            syzygium_curve_free(curve);
        }
    }

    #[test]
    fn scenario_over_c_abi() {
        unsafe {
            let out = syzygium_scenario_run_json(
                c("rem-nonordinary").as_ptr(),
                c("{\"n\": 2, \"l\": 0}").as_ptr(),
            );
            assert!(!out.is_null());
            let text = CStr::from_ptr(out).to_str().unwrap();
            assert!(text.contains("\"PASS\""));
            syzygium_string_free(out);
        }
    }
}
