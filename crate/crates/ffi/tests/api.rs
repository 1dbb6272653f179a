use std::ffi::{CStr, CString};
use std::ptr;

use descent_ffi::*;

unsafe fn build(n: u32) -> *mut DsBetaTable {
    let mut t = ptr::null_mut();
    assert_eq!(ds_beta_table_build(n, &mut t), DsStatus::Ok);
    assert!(!t.is_null());
    t
}

#[test]
fn table_lookup() {
    unsafe {
        let t = build(4);
        assert_eq!(ds_beta_table_n(t), 4);
        assert_eq!(ds_beta_table_len(t), 8);
        let mut v = 0;
        assert_eq!(ds_beta_table_get(t, 0b010, &mut v), DsStatus::Ok);
        assert_eq!(v, 5);
        assert_eq!(ds_beta_table_get(t, 0b1000, &mut v), DsStatus::InvalidArgument);
        let msg = CStr::from_ptr(ds_last_error_message()).to_str().unwrap();
        assert!(msg.contains("outside"), "{msg}");
        ds_beta_table_free(t);
    }
}

#[test]
fn errors() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(ds_beta_table_build(25, &mut t), DsStatus::ResourceLimit);
        assert!(t.is_null());
        assert_eq!(ds_beta_table_build(0, &mut t), DsStatus::InvalidArgument);
        assert_eq!(ds_beta_table_build(5, ptr::null_mut()), DsStatus::NullPointer);
        let mut v = 0;
        assert_eq!(ds_beta_table_get(ptr::null(), 0, &mut v), DsStatus::NullPointer);
        assert_eq!(ds_beta_table_len(ptr::null()), 0);
        assert!(ds_factor_report_to_json(ptr::null()).is_null());
        ds_beta_table_free(ptr::null_mut());
        ds_string_free(ptr::null_mut());
    }
}

#[test]
fn rho_fraction() {
    unsafe {
        let (mut a, mut b) = (0, 0);
        assert_eq!(ds_rho(15, &mut a, &mut b), DsStatus::Ok);
        assert_eq!((a, b), (29, 64));
        assert_eq!(ds_rho(33, &mut a, &mut b), DsStatus::ResourceLimit);
    }
}

#[test]
fn factors_of_q5() {
    unsafe {
        let t = build(5);
        let mut yes = false;
        assert_eq!(ds_divides(t, 10, &mut yes), DsStatus::Ok);
        assert!(yes);
        let mut k = 9;
        assert_eq!(ds_multiplicity(t, 2, &mut k), DsStatus::Ok);
        assert_eq!(k, 2);
        assert_eq!(ds_multiplicity(t, 6, &mut k), DsStatus::Ok);
        assert_eq!(k, 0);

        let mut r = ptr::null_mut();
        assert_eq!(ds_scan_factors(t, 100, false, &mut r), DsStatus::Ok);
        assert_eq!(ds_factor_report_len(r), 2);
        let mut found = Vec::new();
        for i in 0..2 {
            let (mut m, mut mult) = (0, 0);
            assert_eq!(ds_factor_report_get(r, i, &mut m, &mut mult), DsStatus::Ok);
            found.push((m, mult));
        }
        assert_eq!(found, vec![(2, 2), (10, 1)]);
        let (mut m, mut mult) = (0, 0);
        assert_eq!(ds_factor_report_get(r, 2, &mut m, &mut mult), DsStatus::InvalidArgument);

        let json = ds_factor_report_to_json(r);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(text.contains("\"m\":10"), "{text}");
        ds_string_free(json);
        ds_factor_report_free(r);
        ds_beta_table_free(t);
    }
}

#[test]
fn save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("t.dsbt").to_str().unwrap()).unwrap();
    let missing = CString::new(dir.path().join("none.dsbt").to_str().unwrap()).unwrap();
    unsafe {
        let t = build(9);
        assert_eq!(ds_beta_table_save(t, path.as_ptr()), DsStatus::Ok);
        let mut u = ptr::null_mut();
        assert_eq!(ds_beta_table_load(path.as_ptr(), &mut u), DsStatus::Ok);
        for mask in 0..ds_beta_table_len(t) {
            let (mut a, mut b) = (0, 0);
            ds_beta_table_get(t, mask, &mut a);
            ds_beta_table_get(u, mask, &mut b);
            assert_eq!(a, b);
        }
        let mut w = ptr::null_mut();
        assert_eq!(ds_beta_table_load(missing.as_ptr(), &mut w), DsStatus::Io);
        ds_beta_table_free(t);
        ds_beta_table_free(u);
    }
}
