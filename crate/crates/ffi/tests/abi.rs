use std::ffi::{c_char, CStr, CString};
use std::ptr;

use gl2lab_ffi::*;

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { gl2lab_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gl2lab_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

fn mat(n: u64, s: &str) -> *mut Gl2Mat2 {
    let c = CString::new(s).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { gl2lab_mat2_parse(n, c.as_ptr(), &mut m) },
        Gl2Status::Ok
    );
    m
}

#[test]
fn matrix_round_trip() {
    let a = mat(7, "1,1,0,1");
    let b = mat(7, "2,0,0,3");
    let mut c = ptr::null_mut();
    let mut s = ptr::null_mut();
    let (mut det, mut trace, mut order) = (0, 0, 0);
    unsafe {
        assert_eq!(gl2lab_mat2_mul(a, b, &mut c), Gl2Status::Ok);
        assert_eq!(gl2lab_mat2_to_string(c, &mut s), Gl2Status::Ok);
        assert_eq!(
            gl2lab_mat2_det_trace(c, &mut det, &mut trace),
            Gl2Status::Ok
        );
        assert_eq!(gl2lab_mat2_order(a, &mut order), Gl2Status::Ok);
    }
    assert_eq!(take(s), "2,3,0,3");
    assert_eq!((det, trace, order), (6, 5, 7));
    unsafe {
        gl2lab_mat2_free(a);
        gl2lab_mat2_free(b);
        gl2lab_mat2_free(c);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut m = ptr::null_mut();
    let bad = CString::new("1,2,3").unwrap();
    assert_eq!(
        unsafe { gl2lab_mat2_parse(5, bad.as_ptr(), &mut m) },
        Gl2Status::Parse
    );
    assert!(m.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { gl2lab_mat2_parse(5, ptr::null(), &mut m) },
        Gl2Status::NullPointer
    );
    let singular = mat(5, "1,2,2,4");
    let mut order = 0;
    assert_eq!(
        unsafe { gl2lab_mat2_order(singular, &mut order) },
        Gl2Status::NotInvertible
    );
    unsafe { gl2lab_mat2_free(singular) };
    let mut json = ptr::null_mut();
    let mut failed = false;
    let mode = CString::new("cyclotomic").unwrap();
    let status = unsafe {
        gl2lab_scan_json(
            mode.as_ptr(),
            53,
            1,
            false,
            ptr::null(),
            &mut json,
            &mut failed,
        )
    };
    assert_eq!(status, Gl2Status::BudgetExceeded);
    assert!(last_error().contains("53"));
    let ok = mat(5, "1,0,0,1");
    assert!(last_error().is_empty());
    unsafe { gl2lab_mat2_free(ok) };
}

#[test]
fn subgroups_and_conjugacy() {
    let family = CString::new("Cs").unwrap();
    let mut cs = ptr::null_mut();
    assert_eq!(
        unsafe { gl2lab_subgroup_named(family.as_ptr(), 5, &mut cs) },
        Gl2Status::Ok
    );
    let g = mat(5, "0,1,1,0");
    let gens = [g as *const Gl2Mat2];
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { gl2lab_subgroup_generate(5, gens.as_ptr(), 1, &mut h) },
        Gl2Status::Ok
    );
    let (mut order, mut found, mut inside) = (0, false, true);
    let mut witness = ptr::null_mut();
    unsafe {
        assert_eq!(gl2lab_subgroup_order(h, &mut order), Gl2Status::Ok);
        assert_eq!(gl2lab_subgroup_contains(cs, g, &mut inside), Gl2Status::Ok);
        assert_eq!(
            gl2lab_conjugate_contains(cs, h, &mut found, &mut witness),
            Gl2Status::Ok
        );
    }
    // The swap is conjugate to diag(1, -1).
    assert_eq!(order, 2);
    assert!(!inside);
    assert!(found && !witness.is_null());
    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { gl2lab_classify_json(cs, &mut json) },
        Gl2Status::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    assert_eq!(v["is_diagonalizable"], true);
    unsafe {
        gl2lab_mat2_free(witness);
        gl2lab_mat2_free(g);
        gl2lab_subgroup_free(h);
        gl2lab_subgroup_free(cs);
    }
}

#[test]
fn reports_match_the_library() {
    let mut json = ptr::null_mut();
    let mut flag = true;
    let mode = CString::new("abelian").unwrap();
    assert_eq!(
        unsafe {
            gl2lab_scan_json(
                mode.as_ptr(),
                17,
                1,
                false,
                ptr::null(),
                &mut json,
                &mut flag,
            )
        },
        Gl2Status::Ok
    );
    assert!(!flag);
    let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    let lib = gl2lab::scan::scan(&gl2lab::scan::ScanParams::new(
        gl2lab::scan::ScanMode::Abelian,
        17,
        1,
        false,
    ))
    .unwrap();
    assert_eq!(v["classes"], serde_json::to_value(&lib.classes).unwrap());

    let check = CString::new("containment").unwrap();
    let part = CString::new("d").unwrap();
    assert_eq!(
        unsafe { gl2lab_verify_json(check.as_ptr(), 7, part.as_ptr(), &mut json, &mut flag) },
        Gl2Status::Ok
    );
    assert!(flag);
    let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    assert_eq!(v["check"], "containment-d");
    let check = CString::new("nonsense").unwrap();
    assert_eq!(
        unsafe { gl2lab_verify_json(check.as_ptr(), 7, ptr::null(), &mut json, &mut flag) },
        Gl2Status::Parse
    );
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gl2lab.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 10);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
}
