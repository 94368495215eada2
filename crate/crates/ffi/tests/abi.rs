use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use xjacobi_ffi::*;

fn family(a: (i64, i64), b: (i64, i64), m: u32) -> *mut XjFamily {
    let mut f = ptr::null_mut();
    let s = unsafe { xj_family_new(a.0, a.1, b.0, b.1, m, &mut f) };
    assert_eq!(s, XjStatus::Ok);
    assert!(!f.is_null());
    f
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        xj_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn first_member_and_eigenvalues() {
    let f = family((2, 1), (1, 1), 1);
    unsafe {
        assert_eq!(xj_family_m(f), 1);
        let mut v = 0.0;
        assert_eq!(xj_eval(f, 1, 0.5, &mut v), XjStatus::Ok);
        assert!((v - 5.5 / 3.0).abs() < 1e-14);
        assert_eq!(xj_eigenvalue(f, 3, &mut v), XjStatus::Ok);
        assert_eq!(v, -12.0);

        let mut c = [0.0; 4];
        let mut len = 0;
        assert_eq!(xj_coeffs(f, 1, c.as_mut_ptr(), c.len(), &mut len), XjStatus::Ok);
        assert_eq!(len, 2);
        assert!((c[0] - 5.0 / 3.0).abs() < 1e-15 && (c[1] - 1.0 / 3.0).abs() < 1e-15);

        let mut needed = 0;
        let mut buf = [0 as c_char; 64];
        assert_eq!(xj_coeffs_exact(f, 1, buf.as_mut_ptr(), buf.len(), &mut needed), XjStatus::Ok);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "5/3 1/3");
        assert_eq!(needed, 8);
        xj_family_free(f);
    }
}

#[test]
fn buffer_too_small_reports_size() {
    let f = family((7, 2), (1, 2), 2);
    unsafe {
        let mut len = 0;
        assert_eq!(xj_coeffs(f, 5, ptr::null_mut(), 0, &mut len), XjStatus::BufferTooSmall);
        assert_eq!(len, 6);
        let mut needed = 0;
        let mut tiny = [0 as c_char; 2];
        assert_eq!(xj_coeffs_exact(f, 5, tiny.as_mut_ptr(), 2, &mut needed), XjStatus::BufferTooSmall);
        assert!(needed > 2);
        xj_family_free(f);
    }
}

#[test]
fn invalid_parameters_and_errors() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(xj_family_new(3, 1, 1, 1, 2, &mut f), XjStatus::InvalidParams);
        assert!(f.is_null());
        assert!(last_error().contains("alpha + 1 - m - beta"));
        assert_eq!(xj_family_new(-1, 2, -1, 4, 2, &mut f), XjStatus::DegenerateFamily);
        assert_eq!(xj_family_new(1, 0, 1, 1, 1, &mut f), XjStatus::InvalidArgument);

        let a = CString::new("7/2").unwrap();
        let b = CString::new("0.5").unwrap();
        assert_eq!(xj_family_new_str(a.as_ptr(), b.as_ptr(), 2, &mut f), XjStatus::Ok);
        let mut v = 0.0;
        assert_eq!(xj_eval(f, 1, 0.0, &mut v), XjStatus::BelowGap);
        assert_eq!(xj_weight(f, 1.5, &mut v), XjStatus::DomainViolation);
        assert_eq!(xj_eval(f, 2, 0.0, ptr::null_mut()), XjStatus::NullPointer);
        assert_eq!(xj_eval(ptr::null(), 2, 0.0, &mut v), XjStatus::NullPointer);
        xj_family_free(f);
        xj_family_free(ptr::null_mut());

        let bad = CString::new("seven").unwrap();
        assert_eq!(xj_family_new_str(bad.as_ptr(), b.as_ptr(), 2, &mut f), XjStatus::InvalidArgument);
    }
}

#[test]
fn classification_and_deficiency() {
    let f = family((1, 2), (3, 2), 1);
    unsafe {
        let mut c = XjEndpointClass::LimitPoint;
        assert_eq!(xj_classify(f, XjEndpoint::Plus, &mut c), XjStatus::Ok);
        assert_eq!(c, XjEndpointClass::LimitCircle);
        assert_eq!(xj_classify(f, XjEndpoint::Minus, &mut c), XjStatus::Ok);
        assert_eq!(c, XjEndpointClass::LimitPoint);
        let mut k = 9;
        assert_eq!(xj_deficiency(f, &mut k), XjStatus::Ok);
        assert_eq!(k, 1);
        let mut w = 0.0;
        assert_eq!(xj_weight(f, 0.0, &mut w), XjStatus::Ok);
        assert!(w > 0.0);
        xj_family_free(f);
    }
}

#[test]
fn gauss_jacobi_integrates_moments() {
    let mut x = [0.0; 6];
    let mut w = [0.0; 6];
    let s = unsafe { xj_gauss_jacobi(0.0, 0.0, 6, x.as_mut_ptr(), w.as_mut_ptr()) };
    assert_eq!(s, XjStatus::Ok);
    let total: f64 = w.iter().sum();
    let second: f64 = x.iter().zip(&w).map(|(x, w)| x * x * w).sum();
    assert!((total - 2.0).abs() < 1e-14);
    assert!((second - 2.0 / 3.0).abs() < 1e-14);
    let s = unsafe { xj_gauss_jacobi(-2.0, 0.0, 6, x.as_mut_ptr(), w.as_mut_ptr()) };
    assert_eq!(s, XjStatus::Quadrature);
}

#[test]
fn header_is_generated_and_compiles() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/xjacobi.h");
    let text = std::fs::read_to_string(&header).expect("header");
    for sym in [
        "xj_family_new",
        "xj_family_free",
        "xj_eval",
        "xj_coeffs",
        "xj_eigenvalue",
        "xj_weight",
        "xj_classify",
        "xj_deficiency",
        "xj_gauss_jacobi",
        "xj_last_error_message",
        "typedef struct XjFamily XjFamily",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .status()
    else {
        eprintln!("no C compiler, skipping compile check");
        return;
    };
    assert!(status.success());
}
