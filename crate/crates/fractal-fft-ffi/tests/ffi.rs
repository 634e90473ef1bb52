//! Exercises the C entry points exactly as a foreign caller would: through
//! raw pointers and status codes.

use std::ffi::{CStr, CString};
use std::ptr;

use fractal_fft_ffi::*;

const DYADIC_JSON: &str =
    r#"{"dim":1,"K":2,"a_inverse":[[2]],"b":[[0],[1]],"c":[[0],[1]],"m1_class":"hadamard"}"#;

fn make_system(json: &str) -> *mut FractalFftSystem {
    let json = CString::new(json).unwrap();
    let mut system: *mut FractalFftSystem = ptr::null_mut();
    let status = unsafe { fractal_fft_system_from_json(json.as_ptr(), &mut system) };
    assert_eq!(status, FractalFftStatus::Ok);
    assert!(!system.is_null());
    system
}

#[test]
fn system_lifecycle_and_metadata() {
    let system = make_system(DYADIC_JSON);
    unsafe {
        assert_eq!(fractal_fft_system_dim(system), 1);
        assert_eq!(fractal_fft_system_branch_count(system), 2);
        fractal_fft_system_free(system);
        fractal_fft_system_free(ptr::null_mut());
    }
}

#[test]
fn forward_of_delta_is_all_ones() {
    let system = make_system(DYADIC_JSON);
    let mut plan: *mut FractalFftPlan = ptr::null_mut();
    unsafe {
        let status = fractal_fft_plan_build(system, 3, FractalFftOrdering::Obverse, &mut plan);
        assert_eq!(status, FractalFftStatus::Ok);
        let len = fractal_fft_plan_length(plan);
        assert_eq!(len, 8);

        let mut input = vec![0.0f64; 2 * len];
        input[0] = 1.0;
        let mut output = vec![0.0f64; 2 * len];
        let mut counts = FractalFftOpCounts::default();
        let status =
            fractal_fft_plan_forward(plan, input.as_ptr(), output.as_mut_ptr(), len, &mut counts);
        assert_eq!(status, FractalFftStatus::Ok);
        for i in 0..len {
            assert!((output[2 * i] - 1.0).abs() < 1e-12);
            assert!(output[2 * i + 1].abs() < 1e-12);
        }
        assert!(counts.multiplications > 0);

        fractal_fft_plan_free(plan);
        fractal_fft_system_free(system);
    }
}

#[test]
fn forward_inverse_round_trip() {
    let system = make_system(DYADIC_JSON);
    let mut plan: *mut FractalFftPlan = ptr::null_mut();
    unsafe {
        fractal_fft_plan_build(system, 6, FractalFftOrdering::Reverse, &mut plan);
        let len = fractal_fft_plan_length(plan);

        let mut seed = 1234u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let input: Vec<f64> = (0..2 * len).map(|_| next()).collect();
        let mut mid = vec![0.0f64; 2 * len];
        let mut back = vec![0.0f64; 2 * len];

        let status =
            fractal_fft_plan_forward(plan, input.as_ptr(), mid.as_mut_ptr(), len, ptr::null_mut());
        assert_eq!(status, FractalFftStatus::Ok);
        let status =
            fractal_fft_plan_inverse(plan, mid.as_ptr(), back.as_mut_ptr(), len, ptr::null_mut());
        assert_eq!(status, FractalFftStatus::Ok);

        let worst = input
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "round trip residual {worst:.3e}");

        fractal_fft_plan_free(plan);
        fractal_fft_system_free(system);
    }
}

#[test]
fn error_paths_set_messages() {
    unsafe {
        // Null arguments.
        let mut system: *mut FractalFftSystem = ptr::null_mut();
        let status = fractal_fft_system_from_json(ptr::null(), &mut system);
        assert_eq!(status, FractalFftStatus::NullArgument);

        // Malformed JSON.
        let json = CString::new("{not json").unwrap();
        let status = fractal_fft_system_from_json(json.as_ptr(), &mut system);
        assert_eq!(status, FractalFftStatus::ValidationFailed);
        assert!(system.is_null());
        let msg = CStr::from_ptr(fractal_fft_last_error_message());
        assert!(!msg.to_str().unwrap().is_empty());

        // Singular seed matrix fails validation.
        let json = CString::new(r#"{"dim":1,"K":2,"a_inverse":[[3]],"b":[[0],[2]],"c":[[0],[3]]}"#)
            .unwrap();
        let status = fractal_fft_system_from_json(json.as_ptr(), &mut system);
        assert_eq!(status, FractalFftStatus::ValidationFailed);
        let msg = CStr::from_ptr(fractal_fft_last_error_message());
        assert!(msg.to_str().unwrap().contains("M1 singular"));

        // Resource cap on the plan level.
        let good = CString::new(DYADIC_JSON).unwrap();
        assert_eq!(
            fractal_fft_system_from_json(good.as_ptr(), &mut system),
            FractalFftStatus::Ok
        );
        let mut plan: *mut FractalFftPlan = ptr::null_mut();
        let status = fractal_fft_plan_build(system, 40, FractalFftOrdering::Obverse, &mut plan);
        assert_eq!(status, FractalFftStatus::ResourceExceeded);
        assert!(plan.is_null());

        // Wrong buffer length.
        fractal_fft_plan_build(system, 2, FractalFftOrdering::Obverse, &mut plan);
        let input = [0.0f64; 4];
        let mut output = [0.0f64; 4];
        let status = fractal_fft_plan_forward(
            plan,
            input.as_ptr(),
            output.as_mut_ptr(),
            2,
            ptr::null_mut(),
        );
        assert_eq!(status, FractalFftStatus::InvalidArgument);

        fractal_fft_plan_free(plan);
        fractal_fft_system_free(system);
    }
}

#[test]
fn version_string_is_present() {
    let version = unsafe { CStr::from_ptr(fractal_fft_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
