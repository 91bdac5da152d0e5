use std::ffi::{CStr, CString};
use std::ptr;

use balcov_ffi::*;

const SQUARE: &str = r#"{"dim":2,"points":[["1","0"],["0","1"],["-1","0"],["0","-1"]],"r":["0","0"]}"#;
const TRIANGLE: &str = r#"{"dim":2,"points":[[1,0],[-1,1],[-1,-1]],"r":[0,0]}"#;

fn config(json: &str) -> *mut BcConfig {
    let text = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bc_config_from_json(text.as_ptr(), &mut out) }, BcStatus::Ok);
    out
}

fn take(s: *mut std::ffi::c_char) -> String {
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { bc_string_free(s) };
    owned
}

#[test]
fn profile_roundtrip() {
    let cfg = config(SQUARE);
    assert_eq!(unsafe { bc_config_len(cfg) }, 4);
    let mut profile = ptr::null_mut();
    assert_eq!(unsafe { bc_profile_compute(cfg, &mut profile) }, BcStatus::Ok);
    assert_eq!(unsafe { bc_profile_count(profile) }, 2);
    let mut answer = false;
    let opposite = [1usize, 3];
    let adjacent = [1usize, 2];
    unsafe {
        assert_eq!(
            bc_profile_is_balanced(profile, opposite.as_ptr(), 2, &mut answer),
            BcStatus::Ok
        );
        assert!(answer);
        assert_eq!(
            bc_profile_is_balanced(profile, adjacent.as_ptr(), 2, &mut answer),
            BcStatus::Ok
        );
        assert!(!answer);
        let zero = [0usize];
        assert_eq!(
            bc_profile_is_balanced(profile, zero.as_ptr(), 1, &mut answer),
            BcStatus::InputError
        );
        bc_profile_free(profile);
        bc_config_free(cfg);
    }
}

#[test]
fn homology_and_degree() {
    let cfg = config(SQUARE);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bc_homology_json(cfg, &mut out) }, BcStatus::Ok);
    let h: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(h[2]["degree"], 1);
    assert_eq!(h[2]["betti"], 1);
    unsafe { bc_config_free(cfg) };

    let cfg = config(TRIANGLE);
    let tri = CString::new(r#"{"dim":1,"vertex_count":3,"facets":[[1,2],[2,3],[3,1]]}"#).unwrap();
    let cover = CString::new(r#"{"coloring":[1,2,3]}"#).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { bc_degree_json(cfg, tri.as_ptr(), cover.as_ptr(), 1, &mut out) };
    assert_eq!(status, BcStatus::Ok);
    let d: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(d["status"], "ok");
    assert_eq!(d["degree"], 1);
    unsafe { bc_config_free(cfg) };
}

#[test]
fn errors_are_reported() {
    let bad = CString::new(r#"{"dim":2,"points":[["1/0","0"]],"r":["0","0"]}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { bc_config_from_json(bad.as_ptr(), &mut out) },
        BcStatus::InputError
    );
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(bc_last_error_message()) }.to_str().unwrap();
    assert!(msg.contains("1/0"), "{msg}");

    assert_eq!(
        unsafe { bc_config_from_json(ptr::null(), &mut out) },
        BcStatus::NullPointer
    );
    let mut profile = ptr::null_mut();
    assert_eq!(
        unsafe { bc_profile_compute(ptr::null(), &mut profile) },
        BcStatus::NullPointer
    );

    let cfg = config(TRIANGLE);
    let tri = CString::new(r#"{"dim":1,"vertex_count":3,"facets":[[1,2],[3,2],[3,1]]}"#).unwrap();
    let cover = CString::new(r#"{"coloring":[1,2,3]}"#).unwrap();
    let mut s = ptr::null_mut();
    let status = unsafe { bc_degree_json(cfg, tri.as_ptr(), cover.as_ptr(), 0, &mut s) };
    assert_eq!(status, BcStatus::InputError);
    unsafe { bc_config_free(cfg) };
    assert_eq!(unsafe { bc_config_len(ptr::null()) }, 0);
}

#[test]
fn header_is_generated() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/balcov.h")).unwrap();
    for name in [
        "bc_config_from_json",
        "bc_degree_json",
        "bc_string_free",
        "BC_STATUS_INPUT_ERROR",
        "typedef struct BcConfig BcConfig",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/balcov.h");
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header])
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler available; skipping"),
    }
}
