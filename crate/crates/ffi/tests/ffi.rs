use orbinv_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { orbinv_string_free(s) };
    out
}

fn last_error() -> String {
    let p = orbinv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn field(q: u32) -> *mut OrbinvField {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { orbinv_field_new(q, &mut f) }, OrbinvStatus::Ok);
    f
}

fn poly(f: *const OrbinvField, s: &str) -> *mut OrbinvPoly {
    let c = CString::new(s).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { orbinv_poly_parse(f, c.as_ptr(), &mut p) }, OrbinvStatus::Ok);
    p
}

#[test]
fn invariants_and_round_trip() {
    let f = field(3);
    let p = poly(f, "x^2 - T");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { orbinv_poly_to_string(p, &mut s) }, OrbinvStatus::Ok);
    let text = take(s);
    let p2 = poly(f, &text);
    assert_eq!(unsafe { orbinv_invariants_json(p2, 48, &mut s) }, OrbinvStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!((v["e"].as_i64(), v["mu_exp"].as_i64(), v["eta_G_exp"].as_i64()), (Some(2), Some(0), Some(0)));
    unsafe {
        orbinv_poly_free(p2);
        orbinv_poly_free(p);
        orbinv_field_free(f);
    }
}

#[test]
fn matrices() {
    let f = field(2);
    let rows = CString::new(r#"[["0","T"],["1","0"]]"#).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { orbinv_matrix_parse_json(f, rows.as_ptr(), &mut m) }, OrbinvStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { orbinv_matrix_to_json(m, &mut s) }, OrbinvStatus::Ok);
    assert_eq!(take(s), r#"[["0","T"],["1","0"]]"#);
    let mut chi = ptr::null_mut();
    assert_eq!(unsafe { orbinv_matrix_char_poly(m, &mut chi) }, OrbinvStatus::Ok);
    assert_eq!(unsafe { orbinv_poly_to_string(chi, &mut s) }, OrbinvStatus::Ok);
    assert_eq!(take(s), "x^2 + T");
    assert_eq!(unsafe { orbinv_classify_json(m, 48, &mut s) }, OrbinvStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["quasi_regular_elliptic"], true);
    assert_eq!(v["separable"], false);
    let bad = CString::new(r#"[["0","T"]]"#).unwrap();
    let mut m2 = ptr::null_mut();
    assert_eq!(unsafe { orbinv_matrix_parse_json(f, bad.as_ptr(), &mut m2) }, OrbinvStatus::InvalidInput);
    assert!(m2.is_null());
    unsafe {
        orbinv_poly_free(chi);
        orbinv_matrix_free(m);
        orbinv_field_free(f);
    }
}

#[test]
fn error_codes() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { orbinv_field_new(6, &mut f) }, OrbinvStatus::InvalidInput);
    assert!(!last_error().is_empty());
    let f = field(3);
    let c = CString::new("x^2 +").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { orbinv_poly_parse(f, c.as_ptr(), &mut p) }, OrbinvStatus::InvalidInput);
    assert!(last_error().starts_with("Parse"));
    assert_eq!(unsafe { orbinv_poly_parse(ptr::null(), c.as_ptr(), &mut p) }, OrbinvStatus::NullArgument);
    assert_eq!(unsafe { orbinv_poly_parse(f, ptr::null(), &mut p) }, OrbinvStatus::NullArgument);
    let insufficient = poly(f, "x^2 + O(T)");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { orbinv_invariants_json(insufficient, 4, &mut s) }, OrbinvStatus::Precision);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { orbinv_mass_formula_json(2, 4, 12, -1, 10, &mut s) }, OrbinvStatus::Budget);
    assert!(s.is_null());
    unsafe {
        orbinv_poly_free(insufficient);
        orbinv_field_free(f);
        orbinv_string_free(ptr::null_mut());
    }
}

#[test]
fn mass_and_command() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { orbinv_mass_formula_json(3, 2, 6, -1, 1_000_000, &mut s) }, OrbinvStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["sum_totally_ramified"], "2");
    let args = CString::new(r#"["verify-eta-mu","--q","2","--N","2","--count","10","--seed","7"]"#).unwrap();
    let mut code = -1;
    assert_eq!(unsafe { orbinv_command_json(args.as_ptr(), &mut code, &mut s) }, OrbinvStatus::Ok);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["schema_version"], 1);
    let args = CString::new(r#"["classify","--q","3","--poly","x^2 +"]"#).unwrap();
    assert_eq!(unsafe { orbinv_command_json(args.as_ptr(), &mut code, &mut s) }, OrbinvStatus::Ok);
    assert_eq!(code, 2);
    take(s);
}

#[test]
fn header_declares_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/orbinv.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Compile and run a C program against the static library when a C
/// compiler is present.
#[test]
fn c_smoke_program() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("liborbinv_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let out = profile_dir.join("orbinv_smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
