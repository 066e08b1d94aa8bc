//! C ABI for `oscillate`.
//!
//! Every fallible call returns an `OscStatus`; on failure the message is
//! available from `osc_last_error_message` on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use oscillate::analysis::weighted_birkhoff;
use oscillate::circle::{build_denjoy, rotation_flow, rotation_number, DenjoyMap};
use oscillate::flow::FnObservable;
use oscillate::interval::cascade;
use oscillate::numeric::e;
use oscillate::seq::{
    cesaro_mean, liouville_sequence, mobius_sequence, phase_sequence, quadratic_rational_spectrum, subnormal_sequence, PhaseKind,
    WeightSequence,
};
use oscillate::torus::{counterexample_average, normal_form, ModularMatrix};
use oscillate::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscStatus {
    Ok = 0,
    NullPointer,
    InvalidArgument,
    LengthExceeded,
    NotCoprime,
    NotModular,
    NotDiagonalizable,
    NotParabolic,
    NotACharacter,
    NoCycle,
    BisectionFailed,
    NoPositiveFixedPoint,
    CriticalPoint,
    AmbiguousNesting,
    NoConvergence,
    AccuracyBelowTail,
    OutsideTruncation,
    NonMonotone,
    NotLipschitz,
    ZeroProjectivePoint,
    Parse,
    Io,
    BufferTooSmall,
    Panic,
}

impl From<&Error> for OscStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => OscStatus::InvalidArgument,
            Error::LengthExceeded { .. } => OscStatus::LengthExceeded,
            Error::NotCoprime(..) => OscStatus::NotCoprime,
            Error::NotModular(_) => OscStatus::NotModular,
            Error::NotDiagonalizable => OscStatus::NotDiagonalizable,
            Error::NotParabolic => OscStatus::NotParabolic,
            Error::NotACharacter(_) => OscStatus::NotACharacter,
            Error::NoCycle { .. } => OscStatus::NoCycle,
            Error::BisectionFailed(_) => OscStatus::BisectionFailed,
            Error::NoPositiveFixedPoint => OscStatus::NoPositiveFixedPoint,
            Error::CriticalPoint(_) => OscStatus::CriticalPoint,
            Error::AmbiguousNesting(_) => OscStatus::AmbiguousNesting,
            Error::NoConvergence(_) => OscStatus::NoConvergence,
            Error::AccuracyBelowTail { .. } => OscStatus::AccuracyBelowTail,
            Error::OutsideTruncation { .. } => OscStatus::OutsideTruncation,
            Error::NonMonotone(_) => OscStatus::NonMonotone,
            Error::NotLipschitz(_) => OscStatus::NotLipschitz,
            Error::ZeroProjectivePoint => OscStatus::ZeroProjectivePoint,
            Error::Parse(_) => OscStatus::Parse,
            Error::Io(_) => OscStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OscComplex {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for OscComplex {
    fn from(z: num_complex::Complex64) -> Self {
        OscComplex { re: z.re, im: z.im }
    }
}

/// P^{-1} M P = sign * [[1, t], [0, 1]], with P row-major in `p`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OscNormalForm {
    pub p: [i64; 4],
    pub t: i64,
    pub sign: i8,
}

/// Opaque weight sequence.
pub struct OscSequence(WeightSequence);

/// Opaque Denjoy circle map.
pub struct OscDenjoy(DenjoyMap);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Fail {
    Null(&'static str),
    Lib(Error),
    Small(usize),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OscStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            OscStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            OscStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            (&e).into()
        }
        Ok(Err(Fail::Small(need))) => {
            set_error(format!("buffer too small: need {need} elements"));
            OscStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            OscStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn osc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn osc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn emit_sequence(w: oscillate::Result<WeightSequence>, dst: *mut *mut OscSequence) -> Result<(), Fail> {
    let dst = out(dst, "out")?;
    *dst = Box::into_raw(Box::new(OscSequence(w?)));
    Ok(())
}

fn positive(n: usize) -> Result<usize, Fail> {
    if n == 0 {
        Err(Error::InvalidArgument("length must be positive".into()).into())
    } else {
        Ok(n)
    }
}

/// # Safety
/// `dst` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_sequence_mobius(n: usize, dst: *mut *mut OscSequence) -> OscStatus {
    guard(|| emit_sequence(Ok(mobius_sequence(positive(n)?)), dst))
}

/// # Safety
/// `dst` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_sequence_liouville(n: usize, dst: *mut *mut OscSequence) -> OscStatus {
    guard(|| emit_sequence(Ok(liouville_sequence(positive(n)?)), dst))
}

/// c_n = e(n^2 alpha).
///
/// # Safety
/// `dst` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_sequence_quadratic_phase(alpha: f64, n: usize, dst: *mut *mut OscSequence) -> OscStatus {
    guard(|| emit_sequence(Ok(phase_sequence(&PhaseKind::Quadratic { alpha }, positive(n)?)), dst))
}

/// Rademacher signs times n^(-tau), reproducible from `seed`.
///
/// # Safety
/// `dst` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_sequence_subnormal(tau: f64, n: usize, seed: u64, dst: *mut *mut OscSequence) -> OscStatus {
    guard(|| emit_sequence(subnormal_sequence(tau, positive(n)?, seed), dst))
}

/// # Safety
/// `seq` must come from an `osc_sequence_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn osc_sequence_free(seq: *mut OscSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Number of stored terms, 0 for a null handle.
///
/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn osc_sequence_len(seq: *const OscSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `seq` must be a live handle, `dst` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_sequence_growth_bound(seq: *const OscSequence, dst: *mut f64) -> OscStatus {
    guard(|| {
        *out(dst, "dst")? = get(seq, "seq")?.0.growth_bound();
        Ok(())
    })
}

/// The term c_n, 1-based.
///
/// # Safety
/// `seq` must be a live handle, `dst` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_sequence_get(seq: *const OscSequence, n: usize, dst: *mut OscComplex) -> OscStatus {
    guard(|| {
        let s = &get(seq, "seq")?.0;
        if n == 0 || n > s.len() {
            return Err(Error::LengthExceeded { requested: n, stored: s.len() }.into());
        }
        *out(dst, "dst")? = s.get(n).into();
        Ok(())
    })
}

/// sigma_N(t) = (1/N) sum_{n<=N} c_n e(-n t).
///
/// # Safety
/// `seq` must be a live handle, `dst` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_cesaro_mean(seq: *const OscSequence, t: f64, n: usize, dst: *mut OscComplex) -> OscStatus {
    guard(|| {
        *out(dst, "dst")? = cesaro_mean(&get(seq, "seq")?.0, t, n)?.into();
        Ok(())
    })
}

/// S_N = (1/N) sum c_n e(k T^n x) for the rotation T x = x + rho.
///
/// # Safety
/// `seq` must be a live handle, `dst` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_birkhoff_rotation(
    seq: *const OscSequence,
    rho: f64,
    k: i64,
    x: f64,
    n: usize,
    dst: *mut OscComplex,
) -> OscStatus {
    guard(|| {
        let w = &get(seq, "seq")?.0;
        let flow = rotation_flow(rho)?;
        let f = FnObservable::new("character", move |y: &f64| e(k as f64 * y));
        let r = weighted_birkhoff(w, &flow, &f, x, &[positive(n)?])?;
        *out(dst, "dst")? = r.final_value().into();
        Ok(())
    })
}

/// Exact spectrum of e(n^2 p/q). Writes up to `cap` atoms r/s with their
/// amplitudes and stores the total count in `len`; returns BufferTooSmall
/// (with `len` set) when `cap` is insufficient.
///
/// # Safety
/// `r`, `s`, `amp` must be valid for `cap` writes (or null when `cap` is 0);
/// `len` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_gauss_spectrum(
    p: u64,
    q: u64,
    r: *mut u64,
    s: *mut u64,
    amp: *mut OscComplex,
    cap: usize,
    len: *mut usize,
) -> OscStatus {
    guard(|| {
        let atoms = quadratic_rational_spectrum(p, q)?;
        *out(len, "len")? = atoms.len();
        if atoms.len() > cap {
            return Err(Fail::Small(atoms.len()));
        }
        if r.is_null() || s.is_null() || amp.is_null() {
            return if atoms.is_empty() { Ok(()) } else { Err(Fail::Null("r, s, amp")) };
        }
        for (i, a) in atoms.iter().enumerate() {
            *r.add(i) = a.r;
            *s.add(i) = a.s;
            *amp.add(i) = a.amplitude.into();
        }
        Ok(())
    })
}

/// Normal form of the parabolic matrix [[a, b], [c, d]].
///
/// # Safety
/// `dst` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_normal_form(a: i64, b: i64, c: i64, d: i64, dst: *mut OscNormalForm) -> OscStatus {
    guard(|| {
        let nf = normal_form(&ModularMatrix::new(a, b, c, d)?)?;
        *out(dst, "dst")? = OscNormalForm { p: [nf.p.a, nf.p.b, nf.p.c, nf.p.d], t: nf.t, sign: nf.sign };
        Ok(())
    })
}

/// The weighted average of the skew-product counterexample; equal to 1.
///
/// # Safety
/// `dst` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_counterexample_average(alpha: f64, n: u64, dst: *mut OscComplex) -> OscStatus {
    guard(|| {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()).into());
        }
        *out(dst, "dst")? = counterexample_average(alpha, n).into();
        Ok(())
    })
}

/// Period-doubling parameters t_1..t_depth into `ts` (capacity `cap`).
///
/// # Safety
/// `ts` must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn osc_cascade(depth: usize, ts: *mut f64, cap: usize) -> OscStatus {
    guard(|| {
        if ts.is_null() {
            return Err(Fail::Null("ts"));
        }
        if depth > cap {
            return Err(Fail::Small(depth));
        }
        for (i, t) in cascade(depth)?.into_iter().enumerate() {
            *ts.add(i) = t;
        }
        Ok(())
    })
}

/// # Safety
/// `dst` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_denjoy_new(rho: f64, trunc: usize, dst: *mut *mut OscDenjoy) -> OscStatus {
    guard(|| {
        let dst = out(dst, "dst")?;
        *dst = Box::into_raw(Box::new(OscDenjoy(build_denjoy(rho, trunc)?)));
        Ok(())
    })
}

/// # Safety
/// `d` must come from `osc_denjoy_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn osc_denjoy_free(d: *mut OscDenjoy) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// One step of the map on [0, 1).
///
/// # Safety
/// `d` must be a live handle, `dst` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_denjoy_step(d: *const OscDenjoy, x: f64, dst: *mut f64) -> OscStatus {
    guard(|| {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("x = {x} outside [0, 1)")).into());
        }
        *out(dst, "dst")? = get(d, "d")?.0.step(x);
        Ok(())
    })
}

/// Rotation number estimated from `n` lift iterates of `x0`.
///
/// # Safety
/// `d` must be a live handle, `dst` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn osc_denjoy_rotation_number(d: *const OscDenjoy, x0: f64, n: usize, dst: *mut f64) -> OscStatus {
    guard(|| {
        *out(dst, "dst")? = rotation_number(&get(d, "d")?.0, x0, n)?;
        Ok(())
    })
}

/// Runs a config file like `oscillate run`; returns the same exit code
/// (0 success, 1 experiment error, 2 unreadable or invalid config).
///
/// # Safety
/// `config` and `out_dir` must be NUL-terminated UTF-8 strings.
#[no_mangle]
pub unsafe extern "C" fn osc_run_config(config: *const c_char, out_dir: *const c_char, jobs: usize) -> i32 {
    let result = catch_unwind(AssertUnwindSafe(|| {
        if config.is_null() || out_dir.is_null() {
            set_error("null pointer: config or out_dir".into());
            return 2;
        }
        let (Ok(cfg), Ok(dir)) = (CStr::from_ptr(config).to_str(), CStr::from_ptr(out_dir).to_str()) else {
            set_error("paths must be UTF-8".into());
            return 2;
        };
        let text = match std::fs::read_to_string(cfg) {
            Ok(t) => t,
            Err(e) => {
                set_error(format!("{cfg}: {e}"));
                return 2;
            }
        };
        let parsed = match oscillate::cli::ExperimentConfig::parse(&text) {
            Ok(p) => p,
            Err(e) => {
                set_error(format!("{cfg}:{e}"));
                return 2;
            }
        };
        match oscillate::cli::run_config(&text, &parsed, Path::new(dir), jobs, None) {
            Ok(m) if m.ok() => {
                set_error(String::new());
                0
            }
            Ok(m) => {
                let errs: Vec<String> = m.experiments.iter().filter_map(|e| e.error.as_ref().map(|x| format!("{}: {x}", e.name))).collect();
                set_error(errs.join("; "));
                1
            }
            Err(e) => {
                set_error(e.to_string());
                1
            }
        }
    }));
    result.unwrap_or_else(|_| {
        set_error("internal panic".into());
        1
    })
}
