use std::ffi::{CStr, CString};
use std::ptr;

use renorm_lab_ffi::*;

fn arnold_spec() -> CString {
    CString::new(r#"{"id":"arnold","params":{"d":1}}"#).unwrap()
}

fn solved_golden(depth: u32) -> *mut RlMap {
    let spec = arnold_spec();
    let tail = [1u64];
    let mut map = ptr::null_mut();
    let st = unsafe { rl_map_solve(spec.as_ptr(), ptr::null(), 0, tail.as_ptr(), 1, depth, 128, &mut map) };
    assert_eq!(st, RlStatus::Ok);
    assert!(!map.is_null());
    map
}

#[test]
fn solve_extract_and_renormalize_through_handles() {
    let map = solved_golden(10);
    let mut digits = [0u64; 16];
    let mut len = 0usize;
    assert_eq!(unsafe { rl_map_digits(map, digits.as_mut_ptr(), digits.len(), &mut len) }, RlStatus::Ok);
    assert_eq!(&digits[..len], &[1u64; 10]);

    let mut pair = ptr::null_mut();
    assert_eq!(unsafe { rl_pair_extract(map, 3, &mut pair) }, RlStatus::Ok);
    let mut period = 0u64;
    assert_eq!(unsafe { rl_pair_period(pair, &mut period) }, RlStatus::Ok);
    assert_eq!(period, 1);

    let mut renorm = ptr::null_mut();
    assert_eq!(unsafe { rl_pair_renormalize(pair, &mut renorm) }, RlStatus::Ok);
    let mut next = ptr::null_mut();
    assert_eq!(unsafe { rl_pair_extract(map, 4, &mut next) }, RlStatus::Ok);
    let mut next_norm = ptr::null_mut();
    assert_eq!(unsafe { rl_pair_normalize(next, &mut next_norm) }, RlStatus::Ok);
    let mut d = f64::NAN;
    assert_eq!(unsafe { rl_pair_distance(renorm, next_norm, 2, 33, &mut d) }, RlStatus::Ok);
    assert!(d < 1e-20, "renormalized level-3 pair differs from level-4 pair: {d}");

    let json = unsafe { rl_pair_to_json(pair) };
    assert!(!json.is_null());
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    assert!(text.contains("renorm-pair/1"));
    unsafe {
        rl_string_free(json);
        rl_pair_free(next_norm);
        rl_pair_free(next);
        rl_pair_free(renorm);
        rl_pair_free(pair);
        rl_map_free(map);
    }
}

#[test]
fn map_from_parameter_reports_digits_and_omega() {
    let spec = arnold_spec();
    let omega = CString::new("1/4").unwrap();
    let mut map = ptr::null_mut();
    assert_eq!(unsafe { rl_map_new(spec.as_ptr(), omega.as_ptr(), 128, 4, &mut map) }, RlStatus::Ok);
    let w = unsafe { rl_map_omega(map) };
    let text = unsafe { CStr::from_ptr(w) }.to_str().unwrap().to_owned();
    assert!(text.starts_with("2.5"), "{text}");
    unsafe {
        rl_string_free(w);
        rl_map_free(map);
    }
}

#[test]
fn errors_map_to_status_codes_and_messages() {
    let bad = CString::new(r#"{"id":"no_such_family"}"#).unwrap();
    let omega = CString::new("0.3").unwrap();
    let mut map = ptr::null_mut();
    let st = unsafe { rl_map_new(bad.as_ptr(), omega.as_ptr(), 128, 4, &mut map) };
    assert_eq!(st, RlStatus::InvalidArgument);
    assert!(map.is_null());
    let msg = unsafe { CStr::from_ptr(rl_last_error()) }.to_str().unwrap().to_owned();
    assert!(msg.contains("no_such_family"), "{msg}");

    let st = unsafe { rl_map_new(ptr::null(), omega.as_ptr(), 128, 4, &mut map) };
    assert_eq!(st, RlStatus::NullPointer);

    let spec = arnold_spec();
    let zero = CString::new("0").unwrap();
    let st = unsafe { rl_map_new(spec.as_ptr(), zero.as_ptr(), 128, 4, &mut map) };
    assert_eq!(st, RlStatus::SolverFailure);

    let small = solved_golden(6);
    let mut buf = [0u64; 2];
    let mut len = 0usize;
    let st = unsafe { rl_map_digits(small, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(st, RlStatus::BufferTooSmall);
    assert_eq!(len, 6);
    let mut pair = ptr::null_mut();
    assert_eq!(unsafe { rl_pair_extract(small, 2, &mut pair) }, RlStatus::Ok);
    let mut d = 0.0;
    assert_eq!(unsafe { rl_pair_distance(pair, pair, 3, 33, &mut d) }, RlStatus::InvalidArgument);
    unsafe {
        rl_pair_free(pair);
        rl_map_free(small);
        rl_map_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_declares_the_api() {
    let header = include_str!("../include/renorm_lab.h");
    for name in [
        "rl_map_new",
        "rl_map_solve",
        "rl_map_free",
        "rl_pair_extract",
        "rl_pair_period",
        "rl_pair_distance",
        "rl_last_error",
        "RlStatus_Ok",
        "typedef struct RlPair RlPair",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
