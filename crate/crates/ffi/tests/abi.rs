use std::ffi::{CStr, CString};
use std::ptr;

use signed_harmonics_ffi::*;

fn take(s: *mut libc::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { sh_string_free(s) };
    out
}

#[test]
fn min_abs_round_trip() {
    let tau = CString::new("0").unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { sh_min_abs(13, tau.as_ptr(), 0, 0, &mut h) };
    assert_eq!(st, ShStatus::Ok);
    unsafe {
        assert_eq!(sh_min_result_n(h), 13);
        assert_eq!(take(sh_min_result_times_lcm(h)), "607");
        let w = take(sh_min_result_witness(h));
        assert_eq!(w.len(), 13);
        assert!(take(sh_min_result_value(h)).ends_with("/360360"));
        sh_min_result_free(h);
    }
    assert!(sh_last_error_message().is_null());
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("one half").unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { sh_min_abs(5, bad.as_ptr(), 0, 0, &mut h) };
    assert_eq!(st, ShStatus::Parse);
    assert!(h.is_null());
    assert!(take(sh_last_error_message()).contains("one half"));

    let st = unsafe { sh_min_abs(5, ptr::null(), 0, 0, &mut h) };
    assert_eq!(st, ShStatus::NullPointer);

    let zero = CString::new("0").unwrap();
    let st = unsafe { sh_min_abs(40, zero.as_ptr(), 0, 1 << 10, &mut h) };
    assert_eq!(st, ShStatus::Resource);

    let mut x = 0.0;
    assert_eq!(unsafe { sh_prob_exact(0, -1.0, 1.0, &mut x) }, ShStatus::Domain);
    assert_eq!(unsafe { sh_rho_n(1.0, 3, ptr::null_mut()) }, ShStatus::NullPointer);
}

#[test]
fn greedy_handle() {
    let tau = CString::new("0").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sh_greedy_run(tau.as_ptr(), 4, 0, &mut h) }, ShStatus::Ok);
    unsafe {
        assert_eq!(sh_greedy_len(h), 4);
        let signs: Vec<i8> = (1..=4).map(|n| sh_greedy_sign(h, n)).collect();
        assert_eq!(signs, [1, -1, -1, -1]);
        assert_eq!(sh_greedy_sign(h, 5), 0);
        let mut r = 0.0;
        assert_eq!(sh_greedy_residual(h, 4, &mut r), ShStatus::Ok);
        assert!((r - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(sh_greedy_residual(h, 0, &mut r), ShStatus::Domain);
        sh_greedy_free(h);
    }
    let pi = CString::new("pi").unwrap();
    assert_eq!(unsafe { sh_greedy_run(pi.as_ptr(), 100, 128, &mut h) }, ShStatus::Ok);
    unsafe { sh_greedy_free(h) };
}

#[test]
fn scalar_functions() {
    let mut g = 0.0;
    assert_eq!(unsafe { sh_g_density(2.0, 1e-10, &mut g) }, ShStatus::Ok);
    assert!(g > 0.12499 && g <= 0.125);
    let mut r = 0.0;
    assert_eq!(unsafe { sh_rho_n(1.0, 1, &mut r) }, ShStatus::Ok);
    assert!((r + 1.0).abs() < 1e-15);
    let mut p = 0.0;
    assert_eq!(unsafe { sh_prob_exact(1, 0.0, 2.0, &mut p) }, ShStatus::Ok);
    assert_eq!(p, 0.5);
    assert_eq!(sh_tuple_value_count(), 29);
    let v = unsafe { CStr::from_ptr(sh_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
