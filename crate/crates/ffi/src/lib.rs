//! C ABI for the geomconst estimators.
//!
//! The surface follows the usual handle conventions: constructors write an
//! opaque pointer through an out-parameter and return a `GcStatus`; every
//! handle has exactly one `gc_*_free`; strings returned through out-
//! parameters are heap-allocated and must be released with
//! `gc_string_free`. Pointers returned directly (`gc_version`,
//! `gc_estimate_certification`, `gc_last_error_message`) are borrowed and
//! must not be freed.
//!
//! All functions are safe to call from multiple threads as long as each
//! handle is used from one thread at a time. The message from the most
//! recent failure is kept per thread and stays valid until the next
//! failing call on that thread.
//!
//! Panics never unwind across the boundary; they surface as
//! `GcStatus_NumericError` with the panic text in the error message.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use geomconst::constants::{estimate_constant, hilbert_reference};
use geomconst::verify::{default_corpus, identity_catalog, run_suite};
use geomconst::{
    ConstantId, ConstantQuery, Error, Estimate, EvalMode, Exponent, OptConfig, SpaceSpec, Suite,
    ToleranceConfig,
};

/// Result code of every fallible call. `Ok` is zero; everything else
/// leaves a message retrievable with `gc_last_error_message`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    DimensionMismatch = 5,
    Degenerate = 6,
    NotAvailable = 7,
    NumericError = 8,
}

/// Opaque normed-space handle.
pub struct GcSpace {
    spec: SpaceSpec,
}

/// Opaque estimate handle: value, certification, witness, search counters.
pub struct GcEstimate {
    inner: Estimate,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn fail(status: GcStatus, msg: &str) -> GcStatus {
    set_error(msg);
    status
}

fn fail_err(err: &Error) -> GcStatus {
    let status = match err {
        Error::Parse(_) | Error::UnknownIdentity(_) => GcStatus::ParseError,
        Error::Validation(_) | Error::Contract(_) => GcStatus::ValidationError,
        Error::DimensionMismatch { .. } => GcStatus::DimensionMismatch,
        Error::NonFinite(_) => GcStatus::NumericError,
        Error::Degenerate(_) | Error::DegenerateObjective(_) => GcStatus::Degenerate,
        Error::NotAvailable(_) => GcStatus::NotAvailable,
    };
    fail(status, &err.to_string())
}

/// Runs `f`, converting a panic into `NumericError` instead of unwinding
/// into the caller.
fn guarded<F: FnOnce() -> GcStatus>(f: F) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(GcStatus::NumericError, &format!("internal panic: {msg}"))
        }
    }
}

/// Borrows a UTF-8 C string; null and invalid encodings become statuses.
unsafe fn utf8_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, GcStatus> {
    if ptr.is_null() {
        return Err(fail(GcStatus::NullArgument, &format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(GcStatus::InvalidUtf8, &format!("{what} is not valid UTF-8")))
}

fn param(value: f64) -> Option<f64> {
    if value.is_nan() {
        None
    } else {
        Some(value)
    }
}

fn string_out(out: *mut *mut c_char, text: String) -> GcStatus {
    let clean: String = text.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    match CString::new(clean) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            GcStatus::Ok
        }
        Err(_) => fail(GcStatus::NumericError, "string contained an interior NUL"),
    }
}

/// Version of the library as a static string; do not free.
#[no_mangle]
pub extern "C" fn gc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static name of a status code; do not free.
#[no_mangle]
pub extern "C" fn gc_status_name(status: GcStatus) -> *const c_char {
    let name: &[u8] = match status {
        GcStatus::Ok => b"ok\0",
        GcStatus::NullArgument => b"null argument\0",
        GcStatus::InvalidUtf8 => b"invalid utf-8\0",
        GcStatus::ParseError => b"parse error\0",
        GcStatus::ValidationError => b"validation error\0",
        GcStatus::DimensionMismatch => b"dimension mismatch\0",
        GcStatus::Degenerate => b"degenerate\0",
        GcStatus::NotAvailable => b"not available\0",
        GcStatus::NumericError => b"numeric error\0",
    };
    name.as_ptr() as *const c_char
}

/// Message from the most recent failure on the calling thread; empty when
/// nothing failed yet. Borrowed; valid until the next failing call on
/// this thread.
#[no_mangle]
pub extern "C" fn gc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned through an out-parameter. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a space from a JSON document, for example
/// `{"family":"lp","p":1.5,"dim":3}` or
/// `{"family":"polyhedral","functionals":[[1.0,0.0],[0.0,1.0],[0.7,0.7]]}`.
#[no_mangle]
pub unsafe extern "C" fn gc_space_parse(doc: *const c_char, out: *mut *mut GcSpace) -> GcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(GcStatus::NullArgument, "out is null");
        }
        *out = std::ptr::null_mut();
        let text = match utf8_arg(doc, "doc") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match geomconst::space::parse_space_spec(text) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(GcSpace { spec }));
                GcStatus::Ok
            }
            Err(e) => fail_err(&e),
        }
    })
}

/// Builds the sequence space `l_p` of the given dimension; pass
/// `INFINITY` for the max norm.
#[no_mangle]
pub unsafe extern "C" fn gc_space_lp(p: f64, dim: usize, out: *mut *mut GcSpace) -> GcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(GcStatus::NullArgument, "out is null");
        }
        *out = std::ptr::null_mut();
        let exponent = if p.is_infinite() && p > 0.0 {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        };
        match SpaceSpec::lp(exponent, dim) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(GcSpace { spec }));
                GcStatus::Ok
            }
            Err(e) => fail_err(&e),
        }
    })
}

/// Releases a space handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gc_space_free(space: *mut GcSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Dimension of the space, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gc_space_dim(space: *const GcSpace) -> usize {
    if space.is_null() {
        0
    } else {
        (*space).spec.dim()
    }
}

/// Writes the short label of the space (such as `lp:1.5:3`) as a new
/// string; free it with `gc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn gc_space_label(
    space: *const GcSpace,
    out: *mut *mut c_char,
) -> GcStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            return fail(GcStatus::NullArgument, "space or out is null");
        }
        string_out(out, (*space).spec.label())
    })
}

/// Norm of the coordinate vector `coords[0..len]` in this space.
#[no_mangle]
pub unsafe extern "C" fn gc_space_norm(
    space: *const GcSpace,
    coords: *const f64,
    len: usize,
    out: *mut f64,
) -> GcStatus {
    guarded(|| {
        if space.is_null() || coords.is_null() || out.is_null() {
            return fail(GcStatus::NullArgument, "space, coords, or out is null");
        }
        let slice = std::slice::from_raw_parts(coords, len);
        let vector = match geomconst::Vector::new(slice.to_vec()) {
            Ok(v) => v,
            Err(e) => return fail_err(&e),
        };
        match (*space).spec.norm(&vector) {
            Ok(value) => {
                *out = value;
                GcStatus::Ok
            }
            Err(e) => fail_err(&e),
        }
    })
}

/// Estimates a named constant on a space.
///
/// `name` accepts the same spellings as the command line (for example
/// `"A2"`, `"C_NJ'"`, `"L_YJ^I"`, `"delta"`). Parameters that a constant
/// does not take must be `NAN`; parameters it requires must be finite
/// (`tau`/`upsilon` for the two-parameter quadratic means, `t` for the
/// skewed means, `eps` for the modulus of convexity). `mode` selects the
/// evaluation route: 0 keeps the constant's natural route, 1 forces the
/// free-pair form, 2 forces the isosceles-orthogonal form. `restarts`
/// and `seed` control the deterministic multistart search.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_constant(
    space: *const GcSpace,
    name: *const c_char,
    tau: f64,
    upsilon: f64,
    t: f64,
    eps: f64,
    mode: c_int,
    restarts: u32,
    seed: u64,
    out: *mut *mut GcEstimate,
) -> GcStatus {
    guarded(|| {
        if space.is_null() || out.is_null() {
            return fail(GcStatus::NullArgument, "space or out is null");
        }
        *out = std::ptr::null_mut();
        let name = match utf8_arg(name, "name") {
            Ok(n) => n,
            Err(status) => return status,
        };
        let id = match ConstantId::parse(name) {
            Ok(id) => id,
            Err(e) => return fail_err(&e),
        };
        let mode = match mode {
            0 => None,
            1 => Some(EvalMode::Substituted),
            2 => Some(EvalMode::Direct),
            other => {
                return fail(
                    GcStatus::ValidationError,
                    &format!("mode must be 0, 1, or 2, got {other}"),
                )
            }
        };
        let query = ConstantQuery {
            id,
            tau: param(tau),
            upsilon: param(upsilon),
            t: param(t),
            eps: param(eps),
            mode,
        };
        let opt = OptConfig {
            restarts: restarts as usize,
            seed,
            ..OptConfig::default()
        };
        match estimate_constant(&(*space).spec, &query, &opt, &ToleranceConfig::default()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(GcEstimate { inner }));
                GcStatus::Ok
            }
            Err(e) => fail_err(&e),
        }
    })
}

/// Estimated value, or NAN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_value(est: *const GcEstimate) -> f64 {
    if est.is_null() {
        f64::NAN
    } else {
        (*est).inner.value
    }
}

/// Number of objective evaluations behind the estimate; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_evals(est: *const GcEstimate) -> u64 {
    if est.is_null() {
        0
    } else {
        (*est).inner.evals
    }
}

/// Number of evaluations skipped as non-finite; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_skipped(est: *const GcEstimate) -> u64 {
    if est.is_null() {
        0
    } else {
        (*est).inner.skipped
    }
}

/// Largest neighbor-to-neighbor value change seen on a certified grid,
/// or NAN when the estimate did not come from a grid scan.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_window(est: *const GcEstimate) -> f64 {
    if est.is_null() {
        f64::NAN
    } else {
        (*est).inner.bound_window.unwrap_or(f64::NAN)
    }
}

/// Static certification label: `grid-certified`,
/// `heuristic-lower-bound`, or `heuristic-upper-bound`. Do not free.
/// Null for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_certification(est: *const GcEstimate) -> *const c_char {
    if est.is_null() {
        return std::ptr::null();
    }
    let label: &[u8] = match (*est).inner.cert {
        geomconst::Certification::GridCertified => b"grid-certified\0",
        geomconst::Certification::HeuristicLowerBound => b"heuristic-lower-bound\0",
        geomconst::Certification::HeuristicUpperBound => b"heuristic-upper-bound\0",
    };
    label.as_ptr() as *const c_char
}

/// Dimension of the witness vectors; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_witness_dim(est: *const GcEstimate) -> usize {
    if est.is_null() {
        0
    } else {
        (*est).inner.witness.x.dim()
    }
}

/// Copies a witness vector into `buf[0..len]`: `which` 0 is the first
/// vector, 1 the second. `len` must equal the witness dimension.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_witness(
    est: *const GcEstimate,
    which: c_int,
    buf: *mut f64,
    len: usize,
) -> GcStatus {
    guarded(|| {
        if est.is_null() || buf.is_null() {
            return fail(GcStatus::NullArgument, "est or buf is null");
        }
        let witness = &(*est).inner.witness;
        let vector = match which {
            0 => &witness.x,
            1 => &witness.y,
            other => {
                return fail(
                    GcStatus::ValidationError,
                    &format!("which must be 0 or 1, got {other}"),
                )
            }
        };
        if len != vector.dim() {
            return fail(
                GcStatus::DimensionMismatch,
                &format!("buffer holds {len} values, witness has {}", vector.dim()),
            );
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(vector.coords());
        GcStatus::Ok
    })
}

/// Scale factor applied to the second witness vector by a constrained
/// search, or NAN when the witness is a plain unit pair.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_lambda(est: *const GcEstimate) -> f64 {
    if est.is_null() {
        f64::NAN
    } else {
        (*est).inner.witness.lambda.unwrap_or(f64::NAN)
    }
}

/// Releases an estimate handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate_free(est: *mut GcEstimate) {
    if !est.is_null() {
        drop(Box::from_raw(est));
    }
}

/// Closed-form value of a constant on a Hilbert space, written to `out`.
/// Fails with `NotAvailable` when the catalog has no closed form for the
/// query.
#[no_mangle]
pub unsafe extern "C" fn gc_hilbert_reference(
    name: *const c_char,
    tau: f64,
    upsilon: f64,
    t: f64,
    eps: f64,
    out: *mut f64,
) -> GcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(GcStatus::NullArgument, "out is null");
        }
        let name = match utf8_arg(name, "name") {
            Ok(n) => n,
            Err(status) => return status,
        };
        let id = match ConstantId::parse(name) {
            Ok(id) => id,
            Err(e) => return fail_err(&e),
        };
        let query = ConstantQuery {
            id,
            tau: param(tau),
            upsilon: param(upsilon),
            t: param(t),
            eps: param(eps),
            mode: None,
        };
        match hilbert_reference(&query) {
            Ok(value) => {
                *out = value;
                GcStatus::Ok
            }
            Err(e) => fail_err(&e),
        }
    })
}

/// Writes the identity catalog as a JSON array of `{"id", "summary"}`
/// objects; free the string with `gc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn gc_identity_catalog_json(out: *mut *mut c_char) -> GcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(GcStatus::NullArgument, "out is null");
        }
        let entries: Vec<serde_json::Value> = identity_catalog()
            .into_iter()
            .map(|(id, summary)| serde_json::json!({ "id": id, "summary": summary }))
            .collect();
        match serde_json::to_string_pretty(&entries) {
            Ok(text) => string_out(out, text),
            Err(e) => fail(GcStatus::NumericError, &e.to_string()),
        }
    })
}

/// Runs a verification suite and writes the full report as JSON; free
/// the string with `gc_string_free`.
///
/// `corpus_json` is either null or `"default"` for the built-in corpus,
/// or a JSON array of space documents as accepted by `gc_space_parse`.
/// `suite` is `"core"`, `"full"`, or null for core. The caller inspects
/// the per-identity `status` fields in the report; a failed identity is
/// still `GcStatus_Ok` here because the run itself succeeded.
#[no_mangle]
pub unsafe extern "C" fn gc_verify_suite_json(
    corpus_json: *const c_char,
    suite: *const c_char,
    restarts: u32,
    seed: u64,
    out: *mut *mut c_char,
) -> GcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(GcStatus::NullArgument, "out is null");
        }
        *out = std::ptr::null_mut();
        let corpus: Vec<SpaceSpec> = if corpus_json.is_null() {
            default_corpus()
        } else {
            let text = match utf8_arg(corpus_json, "corpus_json") {
                Ok(t) => t,
                Err(status) => return status,
            };
            if text.trim() == "default" {
                default_corpus()
            } else {
                match serde_json::from_str(text) {
                    Ok(spaces) => spaces,
                    Err(e) => return fail(GcStatus::ParseError, &format!("corpus_json: {e}")),
                }
            }
        };
        let suite = if suite.is_null() {
            Suite::Core
        } else {
            let text = match utf8_arg(suite, "suite") {
                Ok(t) => t,
                Err(status) => return status,
            };
            match Suite::parse(text) {
                Ok(s) => s,
                Err(e) => return fail_err(&e),
            }
        };
        let opt = OptConfig {
            restarts: restarts as usize,
            seed,
            ..OptConfig::default()
        };
        match run_suite(&corpus, suite, &opt, &ToleranceConfig::default()) {
            Ok(report) => match serde_json::to_string_pretty(&report) {
                Ok(text) => string_out(out, text),
                Err(e) => fail(GcStatus::NumericError, &e.to_string()),
            },
            Err(e) => fail_err(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn cstring(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn last_error() -> String {
        CStr::from_ptr(gc_last_error_message())
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn version_and_status_names_are_static_strings() {
        unsafe {
            let v = CStr::from_ptr(gc_version()).to_str().unwrap();
            assert_eq!(v, env!("CARGO_PKG_VERSION"));
            let name = CStr::from_ptr(gc_status_name(GcStatus::DimensionMismatch))
                .to_str()
                .unwrap();
            assert_eq!(name, "dimension mismatch");
        }
    }

    #[test]
    fn lp_space_handle_reports_dim_label_and_norm() {
        unsafe {
            let mut space: *mut GcSpace = ptr::null_mut();
            assert_eq!(gc_space_lp(2.0, 2, &mut space), GcStatus::Ok);
            assert_eq!(gc_space_dim(space), 2);

            let mut label: *mut c_char = ptr::null_mut();
            assert_eq!(gc_space_label(space, &mut label), GcStatus::Ok);
            assert_eq!(CStr::from_ptr(label).to_str().unwrap(), "lp:2:2");
            gc_string_free(label);

            let coords = [3.0, 4.0];
            let mut norm = 0.0;
            assert_eq!(
                gc_space_norm(space, coords.as_ptr(), 2, &mut norm),
                GcStatus::Ok
            );
            assert!((norm - 5.0).abs() < 1e-15);

            let mut bad = 0.0;
            assert_eq!(
                gc_space_norm(space, coords.as_ptr(), 1, &mut bad),
                GcStatus::DimensionMismatch
            );
            gc_space_free(space);
        }
    }

    #[test]
    fn json_documents_parse_and_bad_ones_report() {
        unsafe {
            let doc = cstring(r#"{"family":"weighted-lp","p":1.0,"weights":[1.0,2.0]}"#);
            let mut space: *mut GcSpace = ptr::null_mut();
            assert_eq!(gc_space_parse(doc.as_ptr(), &mut space), GcStatus::Ok);
            assert_eq!(gc_space_dim(space), 2);
            gc_space_free(space);

            let bad = cstring("{not json");
            let mut out: *mut GcSpace = ptr::null_mut();
            assert_eq!(gc_space_parse(bad.as_ptr(), &mut out), GcStatus::ParseError);
            assert!(out.is_null());
            assert!(last_error().contains("parse error"));

            let wrong = cstring(r#"{"family":"lp","p":1.0,"dim":2,"grid":8}"#);
            assert_eq!(
                gc_space_parse(wrong.as_ptr(), &mut out),
                GcStatus::ValidationError
            );
            assert!(last_error().contains("does not apply"));
        }
    }

    #[test]
    fn null_arguments_are_rejected_not_dereferenced() {
        unsafe {
            let mut space: *mut GcSpace = ptr::null_mut();
            assert_eq!(
                gc_space_parse(ptr::null(), &mut space),
                GcStatus::NullArgument
            );
            assert_eq!(gc_space_lp(2.0, 2, ptr::null_mut()), GcStatus::NullArgument);
            assert_eq!(gc_space_dim(ptr::null()), 0);
            assert!(gc_estimate_value(ptr::null()).is_nan());
            assert!(gc_estimate_certification(ptr::null()).is_null());
            gc_space_free(ptr::null_mut());
            gc_estimate_free(ptr::null_mut());
            gc_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn invalid_utf8_is_rejected() {
        unsafe {
            let bytes: [c_char; 3] = [-1i8 as c_char, -2i8 as c_char, 0];
            let mut space: *mut GcSpace = ptr::null_mut();
            assert_eq!(
                gc_space_parse(bytes.as_ptr(), &mut space),
                GcStatus::InvalidUtf8
            );
        }
    }

    #[test]
    fn estimates_the_alpha_constant_on_the_euclidean_plane() {
        unsafe {
            let mut space: *mut GcSpace = ptr::null_mut();
            assert_eq!(gc_space_lp(2.0, 2, &mut space), GcStatus::Ok);
            let name = cstring("A2");
            let mut est: *mut GcEstimate = ptr::null_mut();
            let status = gc_estimate_constant(
                space,
                name.as_ptr(),
                f64::NAN,
                f64::NAN,
                f64::NAN,
                f64::NAN,
                0,
                16,
                0,
                &mut est,
            );
            assert_eq!(status, GcStatus::Ok);
            let value = gc_estimate_value(est);
            assert!((value - 2.0f64.sqrt()).abs() < 1e-6, "value {value}");
            assert!(gc_estimate_evals(est) > 0);
            assert!(gc_estimate_lambda(est).is_nan());
            let cert = CStr::from_ptr(gc_estimate_certification(est))
                .to_str()
                .unwrap();
            assert_eq!(cert, "heuristic-lower-bound");

            assert_eq!(gc_estimate_witness_dim(est), 2);
            let mut buf = [0.0f64; 2];
            assert_eq!(
                gc_estimate_witness(est, 0, buf.as_mut_ptr(), 2),
                GcStatus::Ok
            );
            let mut norm = 0.0;
            assert_eq!(
                gc_space_norm(space, buf.as_ptr(), 2, &mut norm),
                GcStatus::Ok
            );
            assert!((norm - 1.0).abs() < 1e-9, "witness norm {norm}");
            assert_eq!(
                gc_estimate_witness(est, 0, buf.as_mut_ptr(), 1),
                GcStatus::DimensionMismatch
            );
            assert_eq!(
                gc_estimate_witness(est, 7, buf.as_mut_ptr(), 2),
                GcStatus::ValidationError
            );
            gc_estimate_free(est);
            gc_space_free(space);
        }
    }

    #[test]
    fn query_validation_errors_cross_the_boundary() {
        unsafe {
            let mut space: *mut GcSpace = ptr::null_mut();
            assert_eq!(gc_space_lp(2.0, 2, &mut space), GcStatus::Ok);
            let mut est: *mut GcEstimate = ptr::null_mut();

            let unknown = cstring("Q7");
            assert_eq!(
                gc_estimate_constant(
                    space,
                    unknown.as_ptr(),
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    0,
                    8,
                    0,
                    &mut est,
                ),
                GcStatus::ParseError
            );
            assert!(last_error().contains("unknown constant"));

            let e = cstring("E");
            assert_eq!(
                gc_estimate_constant(
                    space,
                    e.as_ptr(),
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    0,
                    8,
                    0,
                    &mut est,
                ),
                GcStatus::ValidationError
            );

            let a2 = cstring("A2");
            assert_eq!(
                gc_estimate_constant(
                    space,
                    a2.as_ptr(),
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    9,
                    8,
                    0,
                    &mut est,
                ),
                GcStatus::ValidationError
            );
            assert!(last_error().contains("mode must be"));
            gc_space_free(space);
        }
    }

    #[test]
    fn hilbert_reference_crosses_the_boundary() {
        unsafe {
            let name = cstring("C_NJ");
            let mut value = 0.0;
            assert_eq!(
                gc_hilbert_reference(
                    name.as_ptr(),
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    &mut value
                ),
                GcStatus::Ok
            );
            assert!((value - 1.0).abs() < 1e-15);

            let delta = cstring("delta");
            assert_eq!(
                gc_hilbert_reference(
                    delta.as_ptr(),
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    1.0,
                    &mut value
                ),
                GcStatus::Ok
            );
            assert!((value - (1.0 - (1.0 - 0.25f64).sqrt())).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_catalog_json_lists_every_identity() {
        unsafe {
            let mut text: *mut c_char = ptr::null_mut();
            assert_eq!(gc_identity_catalog_json(&mut text), GcStatus::Ok);
            let parsed: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(text).to_str().unwrap()).unwrap();
            let entries = parsed.as_array().unwrap();
            assert_eq!(entries.len(), 18);
            assert!(entries.iter().any(|e| e["id"] == "EQ-A2"));
            gc_string_free(text);
        }
    }

    #[test]
    fn verify_suite_reports_json_over_the_boundary() {
        unsafe {
            let corpus = cstring(r#"[{"family":"lp","p":1.0,"dim":2}]"#);
            let suite = cstring("core");
            let mut text: *mut c_char = ptr::null_mut();
            let status = gc_verify_suite_json(corpus.as_ptr(), suite.as_ptr(), 24, 0, &mut text);
            assert_eq!(status, GcStatus::Ok);
            let parsed: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(text).to_str().unwrap()).unwrap();
            let reports = parsed["reports"].as_array().unwrap();
            assert_eq!(reports.len(), 6);
            for report in reports {
                assert_eq!(report["status"], "pass", "{report}");
            }
            gc_string_free(text);

            let bad = cstring("[{\"family\":\"nope\"}]");
            assert_eq!(
                gc_verify_suite_json(bad.as_ptr(), suite.as_ptr(), 24, 0, &mut text),
                GcStatus::ParseError
            );
        }
    }
}
