//! C ABI over the `fourphoton` crate.
//!
//! States are opaque `FpState` handles created by `fp_state_*` and released
//! with `fp_state_free`. Every fallible call returns an `FpStatus`; on failure
//! `fp_last_error_message` holds a description for the calling thread.
//!
//! Enum-valued arguments (`FpScoring`, `FpCurveKind`) are passed as `int32_t`
//! and validated, so out-of-range values from C are reported rather than
//! trusted.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use fourphoton::polarimetry::CurveKind;
use fourphoton::qccs::{self, classical_search, promise_inputs, LowBits, Scoring};
use fourphoton::state::{mix_with_white_noise, ExactState, Measurable, NoisyState};
use fourphoton::{correlation, fit_sinusoid, four_photon_state, Error, FringeCurve, Phases};
use num_traits::ToPrimitive;

/// Result code of every fallible call. Zero is success.
#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullPointer = -1,
    InvalidArgument = -2,
    BufferTooSmall = -3,
    OddParity = -4,
    WeightOutOfRange = -5,
    GridTooSmall = -6,
    DegenerateFit = -7,
    UndefinedVisibility = -8,
    Overflow = -9,
    Internal = -99,
}

#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpScoring {
    AllCorrect = 0,
    WorstParty = 1,
}

#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpCurveKind {
    Probability = 0,
    Correlation = 1,
}

/// offset + amplitude·cos(harmonic·θ + phase)
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FpFit {
    pub harmonic: u32,
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub visibility: f64,
    pub residual_rms: f64,
}

/// Opaque four-qubit state with an exact pure part and a white-noise weight.
pub struct FpState {
    exact: ExactState,
    noisy: NoisyState,
}

impl FpState {
    fn new(exact: ExactState) -> Self {
        let noisy = mix_with_white_noise(&exact.to_pure(), 1.0).expect("weight 1 is valid");
        FpState { exact, noisy }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> FpStatus {
    match err {
        Error::OddParityPattern(_) | Error::PromiseViolated { .. } => FpStatus::OddParity,
        Error::WeightOutOfRange(_) => FpStatus::WeightOutOfRange,
        Error::GridTooSmall { .. } => FpStatus::GridTooSmall,
        Error::DegenerateFit => FpStatus::DegenerateFit,
        Error::UndefinedVisibility { .. } => FpStatus::UndefinedVisibility,
        Error::Io { .. } | Error::Csv(_) | Error::Json(_) => FpStatus::Internal,
        _ => FpStatus::InvalidArgument,
    }
}

struct Fail(FpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), format!("{}: {}", e.kind(), e))
    }
}

fn fail(status: FpStatus, msg: &str) -> Fail {
    Fail(status, msg.to_string())
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            FpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            FpStatus::Internal
        }
    }
}

unsafe fn state_ref<'a>(state: *const FpState) -> Result<&'a FpState, Fail> {
    state
        .as_ref()
        .ok_or_else(|| fail(FpStatus::NullPointer, "state handle is null"))
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    out.as_mut()
        .ok_or_else(|| fail(FpStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn out_slice<'a, T>(ptr: *mut T, len: usize, need: usize) -> Result<&'a mut [T], Fail> {
    if ptr.is_null() {
        return Err(fail(FpStatus::NullPointer, "output buffer is null"));
    }
    if len < need {
        return Err(fail(
            FpStatus::BufferTooSmall,
            &format!("buffer holds {len} values, {need} needed"),
        ));
    }
    Ok(slice::from_raw_parts_mut(ptr, need))
}

unsafe fn in_slice<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], Fail> {
    if ptr.is_null() {
        return Err(fail(FpStatus::NullPointer, "input buffer is null"));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn phases_from(ptr: *const f64) -> Result<Phases, Fail> {
    let p = in_slice(ptr, 4)?;
    Ok(Phases {
        c: p[0],
        d: p[1],
        e: p[2],
        f: p[3],
    })
}

fn low_bits(pattern: u8) -> Result<LowBits, Fail> {
    let low = LowBits::new(pattern)?;
    qccs::f0(low)?;
    Ok(low)
}

fn create(out: *mut *mut FpState, exact: impl FnOnce() -> ExactState) -> FpStatus {
    guard(|| {
        let slot = unsafe { out_ref(out, "output handle pointer")? };
        *slot = Box::into_raw(Box::new(FpState::new(exact())));
        Ok(())
    })
}

/// Post-selected four-photon state over modes c,d,e,f. Free with `fp_state_free`.
#[no_mangle]
pub extern "C" fn fp_state_fourphoton(out: *mut *mut FpState) -> FpStatus {
    create(out, || four_photon_state().exact)
}

/// Two Φ+ pairs on (c,d) and (e,f). Free with `fp_state_free`.
#[no_mangle]
pub extern "C" fn fp_state_two_epr(out: *mut *mut FpState) -> FpStatus {
    create(out, qccs::two_epr_exact)
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `state` must come from an `fp_state_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fp_state_free(state: *mut FpState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Sets the weight of the pure part in the white-noise mixture (1 = no noise).
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fp_state_set_noise(state: *mut FpState, weight: f64) -> FpStatus {
    guard(|| {
        let s = state
            .as_mut()
            .ok_or_else(|| fail(FpStatus::NullPointer, "state handle is null"))?;
        s.noisy = mix_with_white_noise(&s.exact.to_pure(), weight)?;
        Ok(())
    })
}

/// Writes the 16 normalized amplitudes (index bits c,d,e,f, c most significant; H=0).
///
/// # Safety
/// `re` and `im` must each point to at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fp_state_amplitudes(
    state: *const FpState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> FpStatus {
    guard(|| {
        let s = state_ref(state)?;
        let pure = s.exact.to_pure();
        let amps = pure.amplitudes();
        let re = out_slice(re, len, amps.len())?;
        let im = out_slice(im, len, amps.len())?;
        for (i, a) in amps.iter().enumerate() {
            re[i] = a.re;
            im[i] = a.im;
        }
        Ok(())
    })
}

/// Exact noiseless protocol success probability for a low-bit pattern
/// (party A in bit 3), as a reduced fraction.
///
/// # Safety
/// `state` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_success_exact(
    state: *const FpState,
    pattern: u8,
    num: *mut i64,
    den: *mut i64,
) -> FpStatus {
    guard(|| {
        let s = state_ref(state)?;
        let p = qccs::quantum_success_probability(low_bits(pattern)?, &s.exact)?;
        let overflow = || fail(FpStatus::Overflow, "fraction does not fit in int64");
        let n = p.numer().to_i64().ok_or_else(overflow)?;
        let d = p.denom().to_i64().ok_or_else(overflow)?;
        *out_ref(num, "num")? = n;
        *out_ref(den, "den")? = d;
        Ok(())
    })
}

/// Protocol success probability including the handle's noise weight.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_success_noisy(
    state: *const FpState,
    pattern: u8,
    out: *mut f64,
) -> FpStatus {
    guard(|| {
        let s = state_ref(state)?;
        let p = qccs::success_probability(low_bits(pattern)?, &s.noisy)?;
        *out_ref(out, "out")? = p;
        Ok(())
    })
}

/// Correlation E(φc, φd, φe, φf) of the (noisy) state.
///
/// # Safety
/// `phases` must point to 4 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_correlation(
    state: *const FpState,
    phases: *const f64,
    out: *mut f64,
) -> FpStatus {
    guard(|| {
        let s = state_ref(state)?;
        let e = correlation(&s.noisy, &phases_from(phases)?)?;
        *out_ref(out, "out")? = e;
        Ok(())
    })
}

/// Joint ± outcome distribution for analyzer phases on c,d,e,f.
/// Index bit 1 in a position means outcome −1 there; c is most significant.
///
/// # Safety
/// `phases` must point to 4 doubles; `probs` to at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fp_born_distribution(
    state: *const FpState,
    phases: *const f64,
    probs: *mut f64,
    len: usize,
) -> FpStatus {
    guard(|| {
        let s = state_ref(state)?;
        let bases = phases_from(phases)?.bases_for(s.noisy.modes())?;
        let dist = s.noisy.born_distribution(&bases)?;
        let p = dist.probabilities();
        out_slice(probs, len, p.len())?.copy_from_slice(p);
        Ok(())
    })
}

/// Least-squares fit of offset + amplitude·cos(harmonic·θ + phase).
/// `kind` is an `FpCurveKind`; at least four strictly increasing angles.
///
/// # Safety
/// `angles` and `values` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_fit_sinusoid(
    angles: *const f64,
    values: *const f64,
    n: usize,
    harmonic: u32,
    kind: i32,
    out: *mut FpFit,
) -> FpStatus {
    guard(|| {
        let kind = match kind {
            0 => CurveKind::Probability,
            1 => CurveKind::Correlation,
            k => return Err(fail(FpStatus::InvalidArgument, &format!("unknown curve kind {k}"))),
        };
        let curve = FringeCurve::new(kind, in_slice(angles, n)?.to_vec(), in_slice(values, n)?.to_vec())?;
        let f = fit_sinusoid(&curve, harmonic)?;
        *out_ref(out, "out")? = FpFit {
            harmonic: f.harmonic,
            offset: f.offset,
            amplitude: f.amplitude,
            phase: f.phase,
            visibility: f.visibility,
            residual_rms: f.residual_rms,
        };
        Ok(())
    })
}

/// Best deterministic one-bit-broadcast classical success over the 128
/// promise-consistent inputs. `scoring` is an `FpScoring`.
///
/// # Safety
/// `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_classical_bound(scoring: i32, num: *mut i64, den: *mut i64) -> FpStatus {
    guard(|| {
        let scoring = match scoring {
            0 => Scoring::AllCorrect,
            1 => Scoring::WorstParty,
            k => return Err(fail(FpStatus::InvalidArgument, &format!("unknown scoring {k}"))),
        };
        let num = out_ref(num, "num")?;
        let den = out_ref(den, "den")?;
        let bound = classical_search(&promise_inputs(None), 1024)?;
        let p = &bound.rule(scoring).probability;
        *num = p.numer().to_i64().unwrap_or(i64::MAX);
        *den = p.denom().to_i64().unwrap_or(i64::MAX);
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn fp_status_message(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        -1 => c"null pointer",
        -2 => c"invalid argument",
        -3 => c"buffer too small",
        -4 => c"odd-parity pattern or promise violated",
        -5 => c"noise weight outside [0, 1]",
        -6 => c"grid too small",
        -7 => c"degenerate fit",
        -8 => c"visibility undefined",
        -9 => c"integer overflow",
        -99 => c"internal error",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Message for the last failing call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn fp_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"unknown",
    };
    VERSION.as_ptr()
}
