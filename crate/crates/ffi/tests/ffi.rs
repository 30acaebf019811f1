use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use alphamat_ffi::*;

fn last_error() -> String {
    let p = am_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn values(s: *const AmSpectrum) -> Vec<f64> {
    let mut len = 0;
    assert_eq!(am_spectrum_len(s, &mut len), AmStatus::Ok);
    let mut buf = vec![f64::NAN; len];
    assert_eq!(am_spectrum_values(s, buf.as_mut_ptr(), len), AmStatus::Ok);
    buf
}

#[test]
fn shift_symbol_sqrt2_cluster() {
    unsafe {
        let name = CString::new("shift1").unwrap();
        let mut sym = ptr::null_mut();
        assert_eq!(am_symbol_builtin(name.as_ptr(), &mut sym), AmStatus::Ok);
        let (n, alpha) = ([100usize], [2usize]);
        let mut m = ptr::null_mut();
        assert_eq!(am_alpha_toeplitz(sym, n.as_ptr(), alpha.as_ptr(), 1, &mut m), AmStatus::Ok);
        let (mut rows, mut cols) = (0, 0);
        assert_eq!(am_matrix_shape(m, &mut rows, &mut cols), AmStatus::Ok);
        assert_eq!((rows, cols), (100, 100));
        let mut s = ptr::null_mut();
        assert_eq!(am_matrix_singvals(m, &mut s), AmStatus::Ok);
        let v = values(s);
        assert_eq!(v.len(), 100);
        for x in &v[..50] {
            assert!((x - 2f64.sqrt()).abs() < 1e-12, "{x}");
        }
        for x in &v[50..] {
            assert!(x.abs() < 1e-12, "{x}");
        }
        am_spectrum_free(s);
        am_matrix_free(m);
        am_symbol_free(sym);
    }
}

#[test]
fn toeplitz_entries_follow_symbol() {
    unsafe {
        let mut sym = ptr::null_mut();
        assert_eq!(am_symbol_new(1, &mut sym), AmStatus::Ok);
        assert_eq!(am_symbol_add(sym, [0i64].as_ptr(), 1, 2.0, 0.0), AmStatus::Ok);
        assert_eq!(am_symbol_add(sym, [1i64].as_ptr(), 1, 0.5, -1.0), AmStatus::Ok);
        let mut m = ptr::null_mut();
        assert_eq!(am_alpha_toeplitz(sym, [4usize].as_ptr(), [2usize].as_ptr(), 1, &mut m), AmStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        // entry (r, c) is a_{r - 2c}
        assert_eq!(am_matrix_get(m, 0, 0, &mut re, &mut im), AmStatus::Ok);
        assert_eq!((re, im), (2.0, 0.0));
        assert_eq!(am_matrix_get(m, 3, 1, &mut re, &mut im), AmStatus::Ok);
        assert_eq!((re, im), (0.5, -1.0));
        assert_eq!(am_matrix_get(m, 1, 1, &mut re, &mut im), AmStatus::Ok);
        assert_eq!((re, im), (0.0, 0.0));
        assert_eq!(am_matrix_get(m, 4, 0, &mut re, &mut im), AmStatus::InvalidArgument);
        assert!(last_error().contains("outside 4x4"));
        am_matrix_free(m);
        am_symbol_free(sym);
    }
}

#[test]
fn closed_form_matches_matrix_svd() {
    let re = [1.0, -0.5, 0.25, 2.0, 0.0, 1.5];
    let im = [0.0, 0.5, -1.0, 0.0, 0.75, -0.25];
    let n = [2usize, 3];
    for alpha in [[0usize, 0], [1, 1], [2, 2], [1, 3], [0, 2]] {
        unsafe {
            let mut closed = ptr::null_mut();
            assert_eq!(
                am_alpha_circulant_singvals(re.as_ptr(), im.as_ptr(), n.as_ptr(), alpha.as_ptr(), 2, &mut closed),
                AmStatus::Ok
            );
            let mut m = ptr::null_mut();
            assert_eq!(am_alpha_circulant(re.as_ptr(), im.as_ptr(), n.as_ptr(), alpha.as_ptr(), 2, &mut m), AmStatus::Ok);
            let mut oracle = ptr::null_mut();
            assert_eq!(am_matrix_singvals(m, &mut oracle), AmStatus::Ok);
            let (a, b) = (values(closed), values(oracle));
            assert_eq!(a.len(), 6);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10, "alpha {alpha:?}: {a:?} vs {b:?}");
            }
            am_spectrum_free(closed);
            am_spectrum_free(oracle);
            am_matrix_free(m);
        }
    }
}

#[test]
fn structural_zero_count() {
    unsafe {
        let re = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let mut s = ptr::null_mut();
        assert_eq!(
            am_alpha_circulant_singvals(re.as_ptr(), ptr::null(), [6usize].as_ptr(), [4usize].as_ptr(), 1, &mut s),
            AmStatus::Ok
        );
        let mut zeros = 0;
        assert_eq!(am_spectrum_structural_zeros(s, &mut zeros), AmStatus::Ok);
        assert_eq!(zeros, 3);
        am_spectrum_free(s);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut sym = ptr::null_mut();
        assert_eq!(am_symbol_new(0, &mut sym), AmStatus::InvalidArgument);
        assert!(sym.is_null());
        assert_eq!(am_symbol_new(1, ptr::null_mut()), AmStatus::NullPointer);
        assert_eq!(last_error(), "output pointer is null");

        let mut m = ptr::null_mut();
        assert_eq!(am_alpha_toeplitz(ptr::null(), [4usize].as_ptr(), [1usize].as_ptr(), 1, &mut m), AmStatus::NullPointer);
        assert_eq!(last_error(), "symbol is null");

        let bad = CString::new("cubic").unwrap();
        assert_eq!(am_symbol_builtin(bad.as_ptr(), &mut sym), AmStatus::InvalidArgument);
        assert!(last_error().contains("cubic"));

        let text = CString::new("0 1.0\n").unwrap();
        assert_eq!(am_symbol_from_text(text.as_ptr(), &mut sym), AmStatus::Parse);
        assert!(last_error().contains("line 1"));

        let text = CString::new("# laplacian\n-1 -1 0\n0 2 0\n1 -1 0\n").unwrap();
        assert_eq!(am_symbol_from_text(text.as_ptr(), &mut sym), AmStatus::Ok);
        assert_eq!(am_alpha_toeplitz(sym, [0usize].as_ptr(), [1usize].as_ptr(), 1, &mut m), AmStatus::InvalidArgument);
        assert_eq!(am_alpha_toeplitz(sym, [4usize, 4].as_ptr(), [1usize, 1].as_ptr(), 2, &mut m), AmStatus::Domain);
        assert!(m.is_null());

        assert_eq!(am_alpha_toeplitz(sym, [5usize].as_ptr(), [1usize].as_ptr(), 1, &mut m), AmStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(am_matrix_singvals(m, &mut s), AmStatus::Ok);
        let mut buf = [0.0; 4];
        assert_eq!(am_spectrum_values(s, buf.as_mut_ptr(), buf.len()), AmStatus::InvalidArgument);
        assert_eq!(last_error(), "buffer holds 4 values, spectrum has 5");
        am_spectrum_free(s);
        am_matrix_free(m);
        am_symbol_free(sym);
    }
}

#[test]
fn free_null_is_noop() {
    unsafe {
        am_symbol_free(ptr::null_mut());
        am_matrix_free(ptr::null_mut());
        am_spectrum_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(am_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

const C_SMOKE: &str = r#"
#include <math.h>
#include <stdio.h>
#include "alphamat.h"

int main(void) {
    struct AmSymbol *sym = NULL;
    struct AmMatrix *m = NULL;
    struct AmSpectrum *s = NULL;
    size_t n = 10, alpha = 2, len = 0;
    double v[10];
    if (am_symbol_builtin("shift1", &sym) != AM_STATUS_OK) return 1;
    if (am_alpha_toeplitz(sym, &n, &alpha, 1, &m) != AM_STATUS_OK) return 2;
    if (am_matrix_singvals(m, &s) != AM_STATUS_OK) return 3;
    if (am_spectrum_len(s, &len) != AM_STATUS_OK || len != 10) return 4;
    if (am_spectrum_values(s, v, 10) != AM_STATUS_OK) return 5;
    for (size_t k = 0; k < 5; k++)
        if (fabs(v[k] - sqrt(2.0)) > 1e-12) return 6;
    if (am_spectrum_values(s, v, 3) != AM_STATUS_INVALID_ARGUMENT) return 7;
    printf("%s\n", am_last_error_message());
    am_spectrum_free(s);
    am_matrix_free(m);
    am_symbol_free(sym);
    return 0;
}
"#;

#[test]
fn c_program_links_against_header() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libalphamat_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("cc not available");
    assert!(status.success(), "C compile failed");

    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke exited {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "buffer holds 3 values, spectrum has 10");
}
