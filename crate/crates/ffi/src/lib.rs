//! C ABI for the linematch library.
//!
//! Instances and transcripts are opaque handles created and destroyed
//! through these functions; strings returned through out-parameters are
//! heap-allocated, NUL-terminated, and must be released with
//! [`lm_string_free`]. Every function returns an [`LmStatus`]; out-values
//! are written only on `LM_STATUS_OK` (except where noted).

use std::ffi::{c_char, CStr, CString};
use std::str::FromStr;

use linematch::harness::{generate_instance, GeneratorKind};
use linematch::verify::{reproduce_dh_counterexample, standard_battery, BatteryLevel};
use linematch::{
    run_with_mode, validate_instance, Algorithm, Instance, PdMode, RunTranscript,
    ValidatedInstance,
};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    RunError = 5,
    BadArgument = 6,
    /// The requested check ran but found violations.
    CheckFailed = 7,
}

/// Opaque validated instance handle.
pub struct LmInstance {
    inner: ValidatedInstance,
}

/// Opaque run transcript handle.
pub struct LmTranscript {
    inner: RunTranscript,
}

fn algorithm_from_code(code: u32) -> Option<Algorithm> {
    match code {
        0 => Some(Algorithm::Greedy),
        1 => Some(Algorithm::Harmonic),
        2 => Some(Algorithm::DoubledHarmonic),
        3 => Some(Algorithm::ModifiedDoubledHarmonic),
        _ => None,
    }
}

fn pd_mode_from_code(code: u32) -> Option<PdMode> {
    match code {
        0 => Some(PdMode::Clamped),
        1 => Some(PdMode::Raw),
        _ => None,
    }
}

fn generator_from_code(code: u32) -> Option<GeneratorKind> {
    match code {
        0 => Some(GeneratorKind::Uniform),
        1 => Some(GeneratorKind::Clustered),
        2 => Some(GeneratorKind::GeometricGaps),
        3 => Some(GeneratorKind::HarmonicAdversary),
        _ => None,
    }
}

fn string_out(text: String, out: *mut *mut c_char) -> LmStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            LmStatus::Ok
        }
        Err(_) => LmStatus::BadArgument,
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn lm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses `{"servers": [...], "requests": [...]}` JSON into an instance
/// handle. With `strict` set, unit minimum gaps, on-server requests and one
/// request per server are enforced.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_instance_parse(
    json: *const c_char,
    strict: bool,
    out: *mut *mut LmInstance,
) -> LmStatus {
    if json.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        return LmStatus::InvalidUtf8;
    };
    let Ok(inst) = Instance::from_json(text) else {
        return LmStatus::ParseError;
    };
    match validate_instance(&inst, strict) {
        Ok((validated, _warnings)) => {
            *out = Box::into_raw(Box::new(LmInstance { inner: validated }));
            LmStatus::Ok
        }
        Err(_) => LmStatus::ValidationError,
    }
}

/// Generates an instance: kind 0 = uniform, 1 = clustered,
/// 2 = geometric gaps, 3 = harmonic adversary.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_instance_generate(
    kind: u32,
    n: usize,
    seed: u64,
    out: *mut *mut LmInstance,
) -> LmStatus {
    if out.is_null() {
        return LmStatus::NullPointer;
    }
    let Some(kind) = generator_from_code(kind) else {
        return LmStatus::BadArgument;
    };
    let Ok(inst) = generate_instance(kind, n, seed) else {
        return LmStatus::BadArgument;
    };
    let Ok((validated, _)) = validate_instance(&inst, false) else {
        return LmStatus::ValidationError;
    };
    *out = Box::into_raw(Box::new(LmInstance { inner: validated }));
    LmStatus::Ok
}

/// Serializes the instance back to JSON. Free the string with
/// [`lm_string_free`].
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_instance_json(
    instance: *const LmInstance,
    out: *mut *mut c_char,
) -> LmStatus {
    if instance.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    string_out((*instance).inner.as_instance().to_json(), out)
}

/// Number of servers in the instance.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_instance_server_count(
    instance: *const LmInstance,
    out: *mut usize,
) -> LmStatus {
    if instance.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    *out = (*instance).inner.n();
    LmStatus::Ok
}

/// Releases an instance handle. Null is ignored.
///
/// # Safety
/// `instance` must be null or a handle produced by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_instance_free(instance: *mut LmInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Runs an algorithm (0 = greedy, 1 = harmonic, 2 = doubled harmonic,
/// 3 = modified doubled harmonic) over the instance with the given seed and
/// pseudo-distance mode (0 = clamped, 1 = raw). Identical inputs produce
/// identical transcripts.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_run(
    instance: *const LmInstance,
    algorithm: u32,
    seed: u64,
    pd_mode: u32,
    out: *mut *mut LmTranscript,
) -> LmStatus {
    if instance.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    let Some(algorithm) = algorithm_from_code(algorithm) else {
        return LmStatus::BadArgument;
    };
    let Some(mode) = pd_mode_from_code(pd_mode) else {
        return LmStatus::BadArgument;
    };
    match run_with_mode(&(*instance).inner, algorithm, seed, mode) {
        Ok(transcript) => {
            *out = Box::into_raw(Box::new(LmTranscript { inner: transcript }));
            LmStatus::Ok
        }
        Err(_) => LmStatus::RunError,
    }
}

/// Total online cost of the run.
///
/// # Safety
/// `transcript` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_transcript_total_cost(
    transcript: *const LmTranscript,
    out: *mut f64,
) -> LmStatus {
    if transcript.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    *out = (*transcript).inner.total_cost;
    LmStatus::Ok
}

/// Offline optimal cost of the full request sequence.
///
/// # Safety
/// `transcript` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_transcript_opt_cost(
    transcript: *const LmTranscript,
    out: *mut f64,
) -> LmStatus {
    if transcript.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    *out = (*transcript).inner.opt_cost;
    LmStatus::Ok
}

/// Online-to-optimal cost ratio (1 when the optimum is zero).
///
/// # Safety
/// `transcript` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_transcript_ratio(
    transcript: *const LmTranscript,
    out: *mut f64,
) -> LmStatus {
    if transcript.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    *out = (*transcript).inner.ratio;
    LmStatus::Ok
}

/// Full transcript as JSON (steps, phase ledger, totals). Free the string
/// with [`lm_string_free`].
///
/// # Safety
/// `transcript` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_transcript_json(
    transcript: *const LmTranscript,
    out: *mut *mut c_char,
) -> LmStatus {
    if transcript.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    string_out((*transcript).inner.to_json(), out)
}

/// Releases a transcript handle. Null is ignored.
///
/// # Safety
/// `transcript` must be null or a handle produced by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_transcript_free(transcript: *mut LmTranscript) {
    if !transcript.is_null() {
        drop(Box::from_raw(transcript));
    }
}

/// Reproduces the four-server non-monotonicity analysis and writes it as
/// JSON. Returns `CheckFailed` (still writing the JSON) if the expected
/// probabilities were not reproduced.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_counterexample_json(out: *mut *mut c_char) -> LmStatus {
    if out.is_null() {
        return LmStatus::NullPointer;
    }
    let report = reproduce_dh_counterexample();
    let serialized = serde_json_string(&report);
    let status = string_out(serialized, out);
    if status != LmStatus::Ok {
        return status;
    }
    if report.pass {
        LmStatus::Ok
    } else {
        LmStatus::CheckFailed
    }
}

/// Runs the verification battery (level 0 = quick, 1 = full; full takes on
/// the order of a minute) and writes the reports as a JSON array. Returns
/// `CheckFailed` (still writing the JSON) when any check has violations.
///
/// # Safety
/// `out` must be a valid pointer; `out_violations` may be null.
#[no_mangle]
pub unsafe extern "C" fn lm_verify_json(
    level: u32,
    seed: u64,
    out_violations: *mut u64,
    out: *mut *mut c_char,
) -> LmStatus {
    if out.is_null() {
        return LmStatus::NullPointer;
    }
    let level = match level {
        0 => BatteryLevel::Quick,
        1 => BatteryLevel::Full,
        _ => return LmStatus::BadArgument,
    };
    let reports = standard_battery(level, seed);
    let violations: u64 = reports.iter().map(|r| r.violations).sum();
    if !out_violations.is_null() {
        *out_violations = violations;
    }
    let serialized = serde_json_string(&reports);
    let status = string_out(serialized, out);
    if status != LmStatus::Ok {
        return status;
    }
    if violations == 0 {
        LmStatus::Ok
    } else {
        LmStatus::CheckFailed
    }
}

/// Parses an algorithm name ("greedy", "harmonic", "dh", "mdh") to the code
/// accepted by [`lm_run`]; returns `BadArgument` for unknown names.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lm_algorithm_code(name: *const c_char, out: *mut u32) -> LmStatus {
    if name.is_null() || out.is_null() {
        return LmStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(name).to_str() else {
        return LmStatus::InvalidUtf8;
    };
    match Algorithm::from_str(text) {
        Ok(Algorithm::Greedy) => *out = 0,
        Ok(Algorithm::Harmonic) => *out = 1,
        Ok(Algorithm::DoubledHarmonic) => *out = 2,
        Ok(Algorithm::ModifiedDoubledHarmonic) => *out = 3,
        Err(_) => return LmStatus::BadArgument,
    }
    LmStatus::Ok
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `text` must be null or a string produced by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

fn serde_json_string<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn take_string(ptr: *mut c_char) -> String {
        let text = CStr::from_ptr(ptr).to_str().unwrap().to_string();
        lm_string_free(ptr);
        text
    }

    #[test]
    fn parse_run_inspect_free() {
        unsafe {
            let json = CString::new(
                r#"{"servers": [0.0, 4.0, 11.0, 31.0], "requests": [4.0, 4.0, 4.0, 0.0]}"#,
            )
            .unwrap();
            let mut instance: *mut LmInstance = ptr::null_mut();
            assert_eq!(
                lm_instance_parse(json.as_ptr(), true, &mut instance),
                LmStatus::Ok
            );
            let mut count = 0usize;
            assert_eq!(lm_instance_server_count(instance, &mut count), LmStatus::Ok);
            assert_eq!(count, 4);

            let mut transcript: *mut LmTranscript = ptr::null_mut();
            assert_eq!(lm_run(instance, 3, 42, 0, &mut transcript), LmStatus::Ok);
            let mut total = f64::NAN;
            let mut opt = f64::NAN;
            let mut ratio = f64::NAN;
            assert_eq!(lm_transcript_total_cost(transcript, &mut total), LmStatus::Ok);
            assert_eq!(lm_transcript_opt_cost(transcript, &mut opt), LmStatus::Ok);
            assert_eq!(lm_transcript_ratio(transcript, &mut ratio), LmStatus::Ok);
            assert!(total.is_finite() && total >= opt - 1e-9);
            assert!((ratio - total / opt).abs() < 1e-12);

            let mut text: *mut c_char = ptr::null_mut();
            assert_eq!(lm_transcript_json(transcript, &mut text), LmStatus::Ok);
            let body = take_string(text);
            assert!(body.contains("\"algorithm\": \"mdh\""));

            lm_transcript_free(transcript);
            lm_instance_free(instance);
        }
    }

    #[test]
    fn identical_seeds_identical_transcripts() {
        unsafe {
            let mut instance: *mut LmInstance = ptr::null_mut();
            assert_eq!(
                lm_instance_generate(0, 12, 9, &mut instance),
                LmStatus::Ok
            );
            let render = |seed: u64| {
                let mut t: *mut LmTranscript = ptr::null_mut();
                assert_eq!(lm_run(instance, 3, seed, 0, &mut t), LmStatus::Ok);
                let mut text: *mut c_char = ptr::null_mut();
                assert_eq!(lm_transcript_json(t, &mut text), LmStatus::Ok);
                let body = take_string(text);
                lm_transcript_free(t);
                body
            };
            assert_eq!(render(5), render(5));
            lm_instance_free(instance);
        }
    }

    #[test]
    fn error_codes() {
        unsafe {
            let mut instance: *mut LmInstance = ptr::null_mut();
            assert_eq!(
                lm_instance_parse(ptr::null(), false, &mut instance),
                LmStatus::NullPointer
            );
            let bad = CString::new("not json").unwrap();
            assert_eq!(
                lm_instance_parse(bad.as_ptr(), false, &mut instance),
                LmStatus::ParseError
            );
            let tight = CString::new(r#"{"servers": [0.0, 0.5], "requests": [0.0, 0.5]}"#).unwrap();
            assert_eq!(
                lm_instance_parse(tight.as_ptr(), true, &mut instance),
                LmStatus::ValidationError
            );
            assert_eq!(lm_instance_generate(9, 8, 0, &mut instance), LmStatus::BadArgument);
            assert_eq!(lm_instance_generate(0, 8, 0, &mut instance), LmStatus::Ok);
            let mut t: *mut LmTranscript = ptr::null_mut();
            assert_eq!(lm_run(instance, 42, 0, 0, &mut t), LmStatus::BadArgument);
            lm_instance_free(instance);

            let name = CString::new("mdh").unwrap();
            let mut code = u32::MAX;
            assert_eq!(lm_algorithm_code(name.as_ptr(), &mut code), LmStatus::Ok);
            assert_eq!(code, 3);
        }
    }

    #[test]
    fn counterexample_over_ffi() {
        unsafe {
            let mut text: *mut c_char = ptr::null_mut();
            assert_eq!(lm_counterexample_json(&mut text), LmStatus::Ok);
            let body = take_string(text);
            assert!(body.contains("\"pass\": true"));
        }
    }

    #[test]
    fn version_is_nul_terminated() {
        unsafe {
            let v = CStr::from_ptr(lm_version());
            assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
        }
    }
}
