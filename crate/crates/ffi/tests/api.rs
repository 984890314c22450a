use std::ffi::{CStr, CString};
use std::ptr;

use seven_inv_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { seven_inv_string_free(s) };
    out
}

fn last_error() -> String {
    let p = seven_inv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn pair(a: [i64; 3], b: [i64; 3]) -> Result<*mut SevenInvPair, SevenInvStatus> {
    let mut out = ptr::null_mut();
    match unsafe { seven_inv_pair_new(a.as_ptr(), b.as_ptr(), &mut out) } {
        SevenInvStatus::Ok => Ok(out),
        s => Err(s),
    }
}

#[test]
fn m1_report_fields() {
    let p = pair([-3, -3, 1], [1, 5, 5]).unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { seven_inv_report_new(p, &mut rep) }, SevenInvStatus::Ok);
    let field = |name: &str| {
        let name = CString::new(name).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { seven_inv_report_field(rep, name.as_ptr(), &mut out) }, SevenInvStatus::Ok);
        take(out)
    };
    assert_eq!(field("n"), "-1");
    assert_eq!(field("s"), "-27/14");
    assert_eq!(field("mu"), "1/14");
    assert_eq!(field("lk"), "trivial");
    assert_eq!(field("defect_minus"), "-1/28");

    let bad = CString::new("nope").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { seven_inv_report_field(rep, bad.as_ptr(), &mut out) }, SevenInvStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(last_error().contains("nope"));

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { seven_inv_report_json(rep, &mut json) }, SevenInvStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    assert_eq!(v["n"], -1);
    assert_eq!(v["s"]["num"], "-27");

    unsafe {
        seven_inv_report_free(rep);
        seven_inv_pair_free(p);
    }
}

#[test]
fn invalid_inputs_map_to_status() {
    assert_eq!(pair([-3, -3, 2], [1, 5, 5]).unwrap_err(), SevenInvStatus::InvalidPair);
    assert!(last_error().contains("a3"));

    let p = pair([1, 1, 1], [1, 1, 1]).unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { seven_inv_report_new(p, &mut rep) }, SevenInvStatus::InfiniteH4);
    assert!(rep.is_null());
    unsafe { seven_inv_pair_free(p) };

    let mut out = ptr::null_mut();
    let a = [1i64, 1, 1];
    assert_eq!(unsafe { seven_inv_pair_new(ptr::null(), a.as_ptr(), &mut out) }, SevenInvStatus::NullArgument);
    assert_eq!(unsafe { seven_inv_pair_new(a.as_ptr(), a.as_ptr(), ptr::null_mut()) }, SevenInvStatus::NullArgument);
    assert_eq!(unsafe { seven_inv_report_new(ptr::null(), &mut rep) }, SevenInvStatus::NullArgument);

    // freeing NULL is a no-op
    unsafe {
        seven_inv_pair_free(ptr::null_mut());
        seven_inv_report_free(ptr::null_mut());
        seven_inv_string_free(ptr::null_mut());
    }
}

#[test]
fn defect_values() {
    let mut out = ptr::null_mut();
    let p = [4i64, -2, 4];
    assert_eq!(unsafe { seven_inv_defect_exact(3, p.as_ptr(), &mut out) }, SevenInvStatus::Ok);
    assert_eq!(take(out), "-1/28");
    let mut x = 0.0;
    assert_eq!(unsafe { seven_inv_defect_float(3, p.as_ptr(), &mut x) }, SevenInvStatus::Ok);
    assert!((x + 1.0 / 28.0).abs() < 1e-12);

    assert_eq!(unsafe { seven_inv_defect_exact(4, p.as_ptr(), &mut out) }, SevenInvStatus::InvalidArgument);
    let q = [3i64, 1, 1];
    assert_eq!(unsafe { seven_inv_defect_float(9, q.as_ptr(), &mut x) }, SevenInvStatus::InvalidArgument);
    assert!(last_error().contains("gcd"));
}

#[test]
fn oracle_through_abi() {
    let p = pair([-3, -3, 1], [1, 1, 1]).unwrap();
    let mut equal = 0;
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { seven_inv_oracle_check(p, &mut equal, &mut json) }, SevenInvStatus::Ok);
    assert_eq!(equal, 1);
    let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    assert_eq!(v["equal"], true);
    assert_eq!(unsafe { seven_inv_oracle_check(p, &mut equal, ptr::null_mut()) }, SevenInvStatus::Ok);
    unsafe { seven_inv_pair_free(p) };
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(seven_inv_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
