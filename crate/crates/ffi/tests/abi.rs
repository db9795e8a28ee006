use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use zxperc_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(zxp_last_error()) }.to_string_lossy().into_owned()
}

fn sample(p: f64, r: f64, n: usize, depth: usize, seed: u64) -> *mut ZxpCircuit {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { zxp_circuit_sample(p, r, n, depth, seed, &mut c) }, ZxpStatus::Ok);
    assert!(!c.is_null());
    c
}

fn take_string(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { zxp_string_free(s) };
    out
}

#[test]
fn circuit_json_round_trip() {
    let c = sample(0.2, 0.4, 6, 5, 9);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { zxp_circuit_to_json(c, &mut json) }, ZxpStatus::Ok);
    let text = take_string(json);
    let cs = CString::new(text.clone()).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { zxp_circuit_from_json(cs.as_ptr(), &mut back) }, ZxpStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { zxp_circuit_to_json(back, &mut again) }, ZxpStatus::Ok);
    assert_eq!(take_string(again), text);
    let (mut n, mut bricks) = (0, 0);
    assert_eq!(unsafe { zxp_circuit_shape(back, &mut n, &mut bricks) }, ZxpStatus::Ok);
    assert_eq!((n, bricks), (6, 5 * 5));
    unsafe {
        zxp_circuit_free(c);
        zxp_circuit_free(back);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { zxp_circuit_sample(1.5, 0.1, 6, 0, 1, &mut c) }, ZxpStatus::InvalidArgument);
    assert!(c.is_null());
    assert!(last_error().contains("p"), "{}", last_error());

    let bad = CString::new("{\"n_qubits\": 4}").unwrap();
    assert_eq!(unsafe { zxp_circuit_from_json(bad.as_ptr(), &mut c) }, ZxpStatus::Parse);
    assert_eq!(unsafe { zxp_circuit_from_json(ptr::null(), &mut c) }, ZxpStatus::NullPointer);
    assert_eq!(unsafe { zxp_circuit_shape(ptr::null(), &mut 0, &mut 0) }, ZxpStatus::NullPointer);

    let odd = sample(0.3, 0.3, 4, 2, 1);
    let mut i2 = 0;
    assert_eq!(unsafe { zxp_circuit_i2(odd, ZxpInitialState::BellPairs, &mut i2) }, ZxpStatus::InvalidArgument);
    let mut steps = 0;
    assert_eq!(unsafe { zxp_diagram_simplify(ptr::null_mut(), ZxpSchedule::Sweep, &mut steps) }, ZxpStatus::NullPointer);

    let cfg = CString::new("{\"experiment\": \"slc\", \"p_grid\": [0.1], \"r_grid\": [0.1], \"n_list\": [5], \"n_realizations\": 4}").unwrap();
    assert_eq!(unsafe { zxp_run_experiment(cfg.as_ptr(), ptr::null(), ptr::null_mut()) }, ZxpStatus::Config);
    assert!(last_error().contains("n_list"));

    let mut path = 0.0;
    assert_eq!(unsafe { zxp_estimate_p_path(0.1, 0.1, 6, 0, 1, 4, &mut path, &mut 0.0) }, ZxpStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe {
        zxp_circuit_free(odd);
        zxp_circuit_free(ptr::null_mut());
        zxp_diagram_free(ptr::null_mut());
        zxp_string_free(ptr::null_mut());
    }
}

#[test]
fn simplification_keeps_percolation_at_zero_bell_probability() {
    for seed in 0..5 {
        let c = sample(0.0, 0.6, 8, 0, seed);
        let mut d = ptr::null_mut();
        assert_eq!(unsafe { zxp_diagram_from_circuit(c, &mut d) }, ZxpStatus::Ok);
        let (mut before, mut wires) = (0, 0);
        assert_eq!(unsafe { zxp_diagram_size(d, &mut before, &mut wires) }, ZxpStatus::Ok);
        assert_eq!(unsafe { zxp_diagram_to_graph_like(d) }, ZxpStatus::Ok);
        assert_eq!(unsafe { zxp_diagram_simplify(d, ZxpSchedule::Parallel, ptr::null_mut()) }, ZxpStatus::Ok);
        let mut after = 0;
        assert_eq!(unsafe { zxp_diagram_size(d, &mut after, &mut wires) }, ZxpStatus::Ok);
        assert!(after < before);
        let mut perc = false;
        assert_eq!(unsafe { zxp_diagram_is_percolating(d, &mut perc) }, ZxpStatus::Ok);
        assert!(perc);

        let mut json = ptr::null_mut();
        assert_eq!(unsafe { zxp_diagram_to_json(d, &mut json) }, ZxpStatus::Ok);
        let text = CString::new(take_string(json)).unwrap();
        let mut copy = ptr::null_mut();
        assert_eq!(unsafe { zxp_diagram_from_json(text.as_ptr(), &mut copy) }, ZxpStatus::Ok);
        let mut again = 0;
        assert_eq!(unsafe { zxp_diagram_simplify(copy, ZxpSchedule::Sweep, &mut again) }, ZxpStatus::Ok);
        assert_eq!(again, 0);
        unsafe {
            zxp_diagram_free(copy);
            zxp_diagram_free(d);
            zxp_circuit_free(c);
        }
    }
}

#[test]
fn ensembles_match_the_core_library() {
    let (mut mean, mut err) = (0.0, 0.0);
    assert_eq!(unsafe { zxp_measure_i2(0.2, 0.1, 12, 0, 5, 20, &mut mean, &mut err) }, ZxpStatus::Ok);
    let core = zxperc::circuit::measure_i2_ensemble(&zxperc::circuit::ModelParams::new(0.2, 0.1, 12, 5), 20).unwrap();
    assert_eq!((mean, err), (core.mean, core.stderr));

    let c = sample(1.0, 0.5, 6, 0, 2);
    let mut i2 = -1;
    assert_eq!(unsafe { zxp_circuit_i2(c, ZxpInitialState::Product, &mut i2) }, ZxpStatus::Ok);
    assert_eq!(i2, 0);
    unsafe { zxp_circuit_free(c) };
}

#[test]
fn experiments_run_through_the_abi() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CString::new(
        "{\"experiment\": \"perc_scan\", \"p_grid\": [0.1, 0.3], \"r_grid\": [0.5], \"n_list\": [4, 8], \"n_realizations\": 4}",
    )
    .unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut manifest = ptr::null_mut();
    assert_eq!(unsafe { zxp_run_experiment(cfg.as_ptr(), out.as_ptr(), &mut manifest) }, ZxpStatus::Ok, "{}", last_error());
    let m: serde_json::Value = serde_json::from_str(&take_string(manifest)).unwrap();
    assert_eq!(m["experiment"], "perc_scan");
    assert!(dir.path().join("p_path.csv").exists());
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn header_compiles_and_links_from_c() {
    if !have("cc") {
        eprintln!("no C compiler; skipped");
        return;
    }
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libzxperc_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
