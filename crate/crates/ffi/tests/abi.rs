use std::ffi::{CStr, CString};
use std::ptr;

use levyspace_ffi::*;

fn last_error() -> String {
    let p = ls_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn stable_symbol_and_operators_round_trip() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(ls_model_stable(1, 1.5, ptr::null(), 0, &mut m), LsStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(ls_model_symbol(m, 0.0, 0.0, &mut re, &mut im), LsStatus::Ok);
        assert_eq!((re, im), (0.0, 0.0));
        assert_eq!(ls_model_symbol(m, 1.0, 0.0, &mut re, &mut im), LsStatus::Ok);
        assert!(re < 0.0 && im.abs() < 1e-12);

        let mut l = ptr::null_mut();
        assert_eq!(ls_lattice_new(1, 1.0, 64, &mut l), LsStatus::Ok);
        assert_eq!(ls_lattice_len(l), 64);
        let vals: Vec<f64> = (0..64).map(|n| (std::f64::consts::TAU * 3.0 * (-0.5 + n as f64 / 64.0)).cos()).collect();
        let mut u = ptr::null_mut();
        assert_eq!(ls_grid_new(l, vals.as_ptr(), ptr::null(), 64, &mut u), LsStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(ls_symbol_compute(m, l, &mut s), LsStatus::Ok);

        let (mut up, mut down, mut back) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(ls_apply_resolvent_power(u, s, 1.0, 0.5, 1, &mut up), LsStatus::Ok);
        assert_eq!(ls_apply_resolvent_power(up, s, 1.0, 0.5, -1, &mut down), LsStatus::Ok);
        let mut out = vec![0.0; 64];
        assert_eq!(ls_grid_values(down, out.as_mut_ptr(), ptr::null_mut(), 64), LsStatus::Ok);
        assert!(out.iter().zip(&vals).all(|(a, b)| (a - b).abs() < 1e-10));

        // u(T) for a single mode against the Duhamel formula
        assert_eq!(ls_solve(u, s, 1.0, 1.0, 64, &mut back), LsStatus::Ok);
        assert_eq!(ls_grid_values(back, out.as_mut_ptr(), ptr::null_mut(), 64), LsStatus::Ok);
        ls_model_symbol(m, 3.0, 0.0, &mut re, &mut im);
        let a = 1.0 - re;
        let amp = (1.0 - (-a).exp()) / a;
        assert!(out.iter().zip(&vals).all(|(x, v)| (x - amp * v).abs() < 1e-10));

        let mut sf = ptr::null_mut();
        assert_eq!(ls_scaling_power(1.5, &mut sf), LsStatus::Ok);
        let mut b = 0.0;
        assert_eq!(ls_besov_norm(u, sf, 4.0, 0.5, &mut b), LsStatus::Ok);
        assert!(b > 0.0 && b.is_finite());

        for g in [u, up, down, back] {
            ls_grid_free(g);
        }
        ls_symbol_free(s);
        ls_lattice_free(l);
        ls_scaling_free(sf);
        ls_model_free(m);
    }
}

#[test]
fn errors_are_reported_not_thrown() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(ls_model_stable(1, 2.5, ptr::null(), 0, &mut m), LsStatus::Domain);
        assert!(m.is_null());
        assert!(last_error().contains("(0,2)"));
        assert_eq!(ls_model_stable(1, 1.0, ptr::null(), 0, ptr::null_mut()), LsStatus::NullPointer);
        assert!(last_error().contains("out_model"));
        let mut v = 0.0;
        assert_eq!(ls_model_order(ptr::null(), &mut v), LsStatus::NullPointer);
        assert_eq!(ls_subordination_constant(0.5, 7, &mut v), LsStatus::Domain);
        assert_eq!(ls_subordination_constant(0.5, 0, &mut v), LsStatus::Ok);
        assert!((v - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-8);

        let bad = CString::new("[model]\nkind = \"stable\"\n").unwrap();
        let mut c = ptr::null_mut();
        assert_eq!(ls_config_parse(bad.as_ptr(), &mut c), LsStatus::Config);
        assert!(last_error().contains("alpha"));
        let mut g = ptr::null_mut();
        let missing = CString::new("/nonexistent/grid.bin").unwrap();
        assert_eq!(ls_grid_load(missing.as_ptr(), &mut g), LsStatus::Io);

        // null frees are no-ops
        ls_model_free(ptr::null_mut());
        ls_string_free(ptr::null_mut());
    }
}

#[test]
fn config_and_verify_through_the_abi() {
    unsafe {
        let t = CString::new("[lattice]\npoints = 256\n[verify]\nchecks = [\"kernel_decay\"]\n").unwrap();
        let mut c = ptr::null_mut();
        assert_eq!(ls_config_parse(t.as_ptr(), &mut c), LsStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(ls_config_to_toml(c, &mut s), LsStatus::Ok);
        assert!(CStr::from_ptr(s).to_str().unwrap().contains("points = 256"));
        ls_string_free(s);
        let (mut j, mut ok) = (ptr::null_mut(), 0);
        assert_eq!(ls_verify(c, &mut j, &mut ok), LsStatus::Ok);
        assert_eq!(ok, 1);
        assert!(CStr::from_ptr(j).to_str().unwrap().contains("kernel_decay_uniformity"));
        ls_string_free(j);
        ls_config_free(c);
        assert!(!CStr::from_ptr(ls_version()).to_str().unwrap().is_empty());
    }
}

#[test]
fn header_declares_the_api_and_compiles_as_c() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/levyspace.h");
    let h = std::fs::read_to_string(path).unwrap();
    for f in ["ls_model_stable", "ls_solve", "ls_last_error", "ls_verify", "LS_STATUS_PANIC", "typedef struct LsModel LsModel"] {
        assert!(h.contains(f), "{f} missing from header");
    }
    // syntax-check with the system C compiler when one is present
    if let Ok(st) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", path]).status() {
        assert!(st.success());
    }
}
