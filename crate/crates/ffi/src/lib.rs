//! C ABI over `alphamat`: opaque handles, status codes and a per-thread error message.
//!
//! Every function returns an [`AmStatus`]; outputs go through pointer arguments.
//! Handles are created by the constructors below and released by the matching `am_*_free`.
//! Pointer arguments must be valid for the stated lengths; null is reported, not dereferenced.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use alphamat::spectra::{alpha_circulant_spectrum, svd_oracle, SpectrumResult};
use alphamat::structured::{alpha_circulant, alpha_toeplitz};
use alphamat::{Error, MultiIndex, StructuredMatrix, SymbolSpec, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Config = 4,
    Numerical = 5,
    Parse = 6,
    Io = 7,
    Panic = 8,
}

/// Finitely supported symbol (Fourier coefficients).
pub struct AmSymbol(SymbolSpec);

/// Dense matrix with its structure tag.
pub struct AmMatrix(StructuredMatrix);

/// Singular values, descending.
pub struct AmSpectrum(SpectrumResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(AmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => AmStatus::Domain,
            Error::Config(_) => AmStatus::Config,
            Error::Numerical(_) => AmStatus::Numerical,
            Error::Parse(_) | Error::Json(_) => AmStatus::Parse,
            Error::Io(_) => AmStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(AmStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(AmStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AmStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn shape(n: *const usize, alpha: *const usize, d: usize) -> Result<(MultiIndex, MultiIndex), Fail> {
    if d == 0 {
        return Err(invalid("number of levels must be positive"));
    }
    let n = slice(n, d, "n")?;
    if n.contains(&0) {
        return Err(invalid("level sizes must be positive"));
    }
    Ok((MultiIndex::from_sizes(n), MultiIndex::from_sizes(slice(alpha, d, "alpha")?)))
}

unsafe fn coeff_vec(re: *const f64, im: *const f64, len: usize) -> Result<Vec<C64>, Fail> {
    let re = slice(re, len, "coeffs_re")?;
    let im = if im.is_null() { None } else { Some(slice(im, len, "coeffs_im")?) };
    Ok((0..len).map(|k| C64::new(re[k], im.map_or(0.0, |v| v[k]))).collect())
}

/// Message for the last failing call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn am_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static string.
#[no_mangle]
pub extern "C" fn am_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Empty symbol with `d` levels.
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_symbol_new(d: usize, out: *mut *mut AmSymbol) -> AmStatus {
    guard(|| {
        if d == 0 {
            return Err(invalid("number of levels must be positive"));
        }
        put(out, AmSymbol(SymbolSpec::new(d)))
    })
}

/// Named symbol: `"laplace1d"` (2 - 2cos x) or `"shift1"` (1 + e^{ix}).
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_symbol_builtin(name: *const c_char, out: *mut *mut AmSymbol) -> AmStatus {
    guard(|| {
        let name = CStr::from_ptr(deref(name, "name")?).to_str().map_err(|_| invalid("name is not UTF-8"))?;
        let s = match name {
            "laplace1d" => SymbolSpec::laplace1d(),
            "shift1" => SymbolSpec::shift1(),
            other => return Err(invalid(format!("unknown builtin symbol `{other}`"))),
        };
        put(out, AmSymbol(s))
    })
}

/// Parses the text format: one `j1 .. jd re im` line per coefficient.
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_symbol_from_text(text: *const c_char, out: *mut *mut AmSymbol) -> AmStatus {
    guard(|| {
        let text = CStr::from_ptr(deref(text, "text")?).to_str().map_err(|_| invalid("text is not UTF-8"))?;
        put(out, AmSymbol(SymbolSpec::from_text(text)?))
    })
}

/// Adds `re + i im` to the coefficient at the `d`-index `idx`.
/// `sym` must be a live handle; `idx` must point to `d` integers.
#[no_mangle]
pub unsafe extern "C" fn am_symbol_add(sym: *mut AmSymbol, idx: *const i64, d: usize, re: f64, im: f64) -> AmStatus {
    guard(|| {
        let s = sym.as_mut().ok_or_else(|| null("symbol"))?;
        let idx = slice(idx, d, "idx")?;
        Ok(s.0.add(MultiIndex::new(idx.to_vec()), C64::new(re, im))?)
    })
}

/// `sym` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn am_symbol_free(sym: *mut AmSymbol) {
    if !sym.is_null() {
        drop(Box::from_raw(sym));
    }
}

/// `T_{n,α}` with entries `a_{r - α∘c}`.
/// `sym` must be a live handle; `n` and `alpha` must point to `d` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_alpha_toeplitz(
    sym: *const AmSymbol,
    n: *const usize,
    alpha: *const usize,
    d: usize,
    out: *mut *mut AmMatrix,
) -> AmStatus {
    guard(|| {
        let s = deref(sym, "symbol")?;
        let (n, alpha) = shape(n, alpha, d)?;
        put(out, AmMatrix(alpha_toeplitz(&s.0, &n, &alpha)?))
    })
}

/// `C_{n,α}` with entries `a_{(r - α∘s) mod n}`. The `n̂` coefficients are given in
/// lexicographic order; `coeffs_im` may be null for real data.
/// `coeffs_re` (and `coeffs_im` if non-null) must hold `n̂` values; `n`, `alpha` must hold `d`.
#[no_mangle]
pub unsafe extern "C" fn am_alpha_circulant(
    coeffs_re: *const f64,
    coeffs_im: *const f64,
    n: *const usize,
    alpha: *const usize,
    d: usize,
    out: *mut *mut AmMatrix,
) -> AmStatus {
    guard(|| {
        let (n, alpha) = shape(n, alpha, d)?;
        let a = coeff_vec(coeffs_re, coeffs_im, n.product() as usize)?;
        put(out, AmMatrix(alpha_circulant(&a, &n, &alpha)?))
    })
}

/// `m` must be a live handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_matrix_shape(m: *const AmMatrix, rows: *mut usize, cols: *mut usize) -> AmStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if rows.is_null() || cols.is_null() {
            return Err(null("output pointer"));
        }
        *rows = m.0.matrix.rows();
        *cols = m.0.matrix.cols();
        Ok(())
    })
}

/// `m` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_matrix_get(m: *const AmMatrix, r: usize, c: usize, re: *mut f64, im: *mut f64) -> AmStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if r >= m.0.matrix.rows() || c >= m.0.matrix.cols() {
            return Err(invalid(format!("entry ({r}, {c}) outside {}x{}", m.0.matrix.rows(), m.0.matrix.cols())));
        }
        if re.is_null() || im.is_null() {
            return Err(null("output pointer"));
        }
        let z = m.0.matrix.get(r, c);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Singular values by the Jacobi SVD.
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_matrix_singvals(m: *const AmMatrix, out: *mut *mut AmSpectrum) -> AmStatus {
    guard(|| put(out, AmSpectrum(svd_oracle(&deref(m, "matrix")?.0.matrix)?)))
}

/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn am_matrix_free(m: *mut AmMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Closed-form singular values of `C_{n,α}` (no matrix is formed).
/// As for [`am_alpha_circulant`].
#[no_mangle]
pub unsafe extern "C" fn am_alpha_circulant_singvals(
    coeffs_re: *const f64,
    coeffs_im: *const f64,
    n: *const usize,
    alpha: *const usize,
    d: usize,
    out: *mut *mut AmSpectrum,
) -> AmStatus {
    guard(|| {
        let (n, alpha) = shape(n, alpha, d)?;
        let a = coeff_vec(coeffs_re, coeffs_im, n.product() as usize)?;
        put(out, AmSpectrum(alpha_circulant_spectrum(&a, &n, &alpha)?))
    })
}

/// `s` must be a live handle; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_spectrum_len(s: *const AmSpectrum, len: *mut usize) -> AmStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        if len.is_null() {
            return Err(null("output pointer"));
        }
        *len = s.0.len();
        Ok(())
    })
}

/// Copies the values (descending) into `buf`, which must hold at least the spectrum length.
/// `s` must be a live handle; `buf` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn am_spectrum_values(s: *const AmSpectrum, buf: *mut f64, cap: usize) -> AmStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        if cap < s.0.len() {
            return Err(invalid(format!("buffer holds {cap} values, spectrum has {}", s.0.len())));
        }
        if buf.is_null() && !s.0.is_empty() {
            return Err(null("buf"));
        }
        for (k, &v) in s.0.values.iter().enumerate() {
            *buf.add(k) = v;
        }
        Ok(())
    })
}

/// Number of structural zeros at the end of the spectrum.
/// `s` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn am_spectrum_structural_zeros(s: *const AmSpectrum, count: *mut usize) -> AmStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        if count.is_null() {
            return Err(null("output pointer"));
        }
        *count = s.0.structural_zero_count;
        Ok(())
    })
}

/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn am_spectrum_free(s: *mut AmSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
