//! C ABI for the fractal-fft library.
//!
//! Systems are loaded from the same JSON configuration format the CLI uses;
//! plans are built per (level, ordering) and applied to interleaved
//! double-precision buffers (`re, im, re, im, …`). All handles are opaque;
//! every fallible call returns a status code and leaves a human-readable
//! message retrievable with [`fractal_fft_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use fractal_fft::{Error, FractalSystem, OpCounter, Ordering, SystemConfig, TransformPlan};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractalFftStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was malformed (bad UTF-8, wrong buffer length, bad enum).
    InvalidArgument = 2,
    /// The configuration failed validation.
    ValidationFailed = 3,
    /// A configured size cap was exceeded.
    ResourceExceeded = 4,
    /// A matrix was singular or an inverse failed its residual check.
    NumericalFailure = 5,
    /// A panic was caught at the FFI boundary.
    Panicked = 6,
}

/// Composition ordering selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractalFftOrdering {
    Obverse = 0,
    Reverse = 1,
}

/// Complex multiplication/addition tally of one apply.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FractalFftOpCounts {
    pub multiplications: u64,
    pub additions: u64,
}

/// Opaque handle to a validated system.
pub struct FractalFftSystem {
    inner: FractalSystem,
}

/// Opaque handle to a transform plan.
pub struct FractalFftPlan {
    inner: TransformPlan,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> FractalFftStatus {
    match err {
        Error::OutOfRange(_) | Error::ShapeMismatch { .. } => FractalFftStatus::InvalidArgument,
        Error::Validation(_) | Error::Io(_) | Error::Json(_) | Error::Verification(_) => {
            FractalFftStatus::ValidationFailed
        }
        Error::Resource(_) => FractalFftStatus::ResourceExceeded,
        Error::Numerical(_) => FractalFftStatus::NumericalFailure,
    }
}

fn fail(err: &Error) -> FractalFftStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guard(body: impl FnOnce() -> FractalFftStatus) -> FractalFftStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic caught at the FFI boundary");
            FractalFftStatus::Panicked
        }
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fractal_fft_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fractal_fft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses and validates a JSON system configuration. On success writes a
/// system handle to `out`; free it with [`fractal_fft_system_free`].
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_system_from_json(
    json: *const c_char,
    out: *mut *mut FractalFftSystem,
) -> FractalFftStatus {
    if json.is_null() || out.is_null() {
        set_error("null argument");
        return FractalFftStatus::NullArgument;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t.to_owned(),
        Err(_) => {
            set_error("configuration is not valid UTF-8");
            return FractalFftStatus::InvalidArgument;
        }
    };
    *out = ptr::null_mut();
    guard(|| {
        let system = match SystemConfig::from_json(&text).and_then(|c| c.to_system()) {
            Ok(system) => system,
            Err(err) => return fail(&err),
        };
        unsafe {
            *out = Box::into_raw(Box::new(FractalFftSystem { inner: system }));
        }
        FractalFftStatus::Ok
    })
}

/// Releases a system handle. Null is a no-op.
///
/// # Safety
/// `system` must have been returned by [`fractal_fft_system_from_json`] and
/// not freed before.
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_system_free(system: *mut FractalFftSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Spatial dimension `d`; 0 when `system` is null.
///
/// # Safety
/// `system` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_system_dim(system: *const FractalFftSystem) -> usize {
    system.as_ref().map_or(0, |s| s.inner.dim())
}

/// Branch count `K`; 0 when `system` is null.
///
/// # Safety
/// `system` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_system_branch_count(system: *const FractalFftSystem) -> usize {
    system.as_ref().map_or(0, |s| s.inner.branch_count())
}

/// Builds a transform plan for `K^level` samples under the given ordering.
/// Free the handle with [`fractal_fft_plan_free`].
///
/// # Safety
/// `system` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_plan_build(
    system: *const FractalFftSystem,
    level: u32,
    ordering: FractalFftOrdering,
    out: *mut *mut FractalFftPlan,
) -> FractalFftStatus {
    let Some(system) = system.as_ref() else {
        set_error("null system handle");
        return FractalFftStatus::NullArgument;
    };
    if out.is_null() {
        set_error("null output pointer");
        return FractalFftStatus::NullArgument;
    }
    let ordering = match ordering {
        FractalFftOrdering::Obverse => Ordering::Obverse,
        FractalFftOrdering::Reverse => Ordering::Reverse,
    };
    *out = ptr::null_mut();
    guard(|| {
        let plan = match system.inner.build_plan(level, ordering) {
            Ok(plan) => plan,
            Err(err) => return fail(&err),
        };
        unsafe {
            *out = Box::into_raw(Box::new(FractalFftPlan { inner: plan }));
        }
        FractalFftStatus::Ok
    })
}

/// Releases a plan handle. Null is a no-op.
///
/// # Safety
/// `plan` must have been returned by [`fractal_fft_plan_build`] and not
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_plan_free(plan: *mut FractalFftPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Number of complex samples (`K^N`) the plan applies to; 0 on null.
///
/// # Safety
/// `plan` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_plan_length(plan: *const FractalFftPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.inner.len())
}

unsafe fn apply(
    plan: *const FractalFftPlan,
    input: *const f64,
    output: *mut f64,
    len: usize,
    counts: *mut FractalFftOpCounts,
    inverse: bool,
) -> FractalFftStatus {
    let Some(plan) = plan.as_ref() else {
        set_error("null plan handle");
        return FractalFftStatus::NullArgument;
    };
    if input.is_null() || output.is_null() {
        set_error("null signal buffer");
        return FractalFftStatus::NullArgument;
    }
    if len != plan.inner.len() {
        set_error(&format!(
            "signal length {} does not match plan length {}",
            len,
            plan.inner.len()
        ));
        return FractalFftStatus::InvalidArgument;
    }
    guard(|| {
        let samples: Vec<Complex64> = (0..len)
            .map(|i| unsafe { Complex64::new(*input.add(2 * i), *input.add(2 * i + 1)) })
            .collect();
        let mut counter = OpCounter::new();
        let result = if inverse {
            plan.inner.inverse(&samples, &mut counter)
        } else {
            plan.inner.forward(&samples, &mut counter)
        };
        let result = match result {
            Ok(r) => r,
            Err(err) => return fail(&err),
        };
        unsafe {
            for (i, z) in result.iter().enumerate() {
                *output.add(2 * i) = z.re;
                *output.add(2 * i + 1) = z.im;
            }
            if !counts.is_null() {
                (*counts).multiplications = counter.multiplications;
                (*counts).additions = counter.additions;
            }
        }
        FractalFftStatus::Ok
    })
}

/// Applies the forward transform. `input` and `output` are interleaved
/// buffers of `2·len` doubles; `counts` may be null.
///
/// # Safety
/// `plan` must be live; `input`/`output` must point to at least `2·len`
/// readable/writable doubles and must not overlap.
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_plan_forward(
    plan: *const FractalFftPlan,
    input: *const f64,
    output: *mut f64,
    len: usize,
    counts: *mut FractalFftOpCounts,
) -> FractalFftStatus {
    apply(plan, input, output, len, counts, false)
}

/// Applies the inverse transform; arguments as in
/// [`fractal_fft_plan_forward`].
///
/// # Safety
/// Same requirements as [`fractal_fft_plan_forward`].
#[no_mangle]
pub unsafe extern "C" fn fractal_fft_plan_inverse(
    plan: *const FractalFftPlan,
    input: *const f64,
    output: *mut f64,
    len: usize,
    counts: *mut FractalFftOpCounts,
) -> FractalFftStatus {
    apply(plan, input, output, len, counts, true)
}
