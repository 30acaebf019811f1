//! Jacobi kernels: one-sided (Hestenes) SVD and cyclic Hermitian eigensolver.
//!
//! Both work on real or complex scalars through the small [`Scalar`] trait so
//! that real matrices, which dominate the Toeplitz experiments, take the
//! cheaper `f64` path.

use std::ops::{Add, Mul, Sub};

use crate::dense::{DenseMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 60;
pub const REL_TOL: f64 = 1e-14;

pub(crate) trait Scalar:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn zero() -> Self;
    fn conj(self) -> Self;
    fn abs_sq(self) -> f64;
    fn abs(self) -> f64 {
        self.abs_sq().sqrt()
    }
    fn scale(self, s: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn conj(self) -> Self {
        self
    }
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        ZERO
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

/// Rotation parameters `(c, s)` annihilating the off-diagonal entry of
/// `[[app, apq], [conj(apq), aqq]]`, with `apq` replaced by its modulus.
#[inline]
fn rotation(app: f64, aqq: f64, apq_abs: f64) -> (f64, f64, f64) {
    let zeta = (aqq - app) / (2.0 * apq_abs);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t, t)
}

fn svd_tol(rows: usize) -> f64 {
    REL_TOL.max(4.0 * (rows as f64).sqrt() * f64::EPSILON)
}

/// Singular values of the matrix whose columns are `cols` (each of equal length),
/// unsorted, one per column.
pub(crate) fn one_sided<S: Scalar>(mut cols: Vec<Vec<S>>) -> Result<Vec<f64>> {
    let n = cols.len();
    let m = cols.first().map_or(0, |c| c.len());
    let tol = svd_tol(m);
    let mut norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x.abs_sq()).sum()).collect();

    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (a, b) = (norms[p], norms[q]);
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                let (cp, cq) = pair_mut(&mut cols, p, q);
                let mut g = S::zero();
                for (x, y) in cp.iter().zip(cq.iter()) {
                    g = g + x.conj() * *y;
                }
                let g_abs = g.abs();
                if g_abs <= tol * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, t) = rotation(a, b, g_abs);
                // w = g/|g|; q column is phase-aligned with conj(w) before rotating.
                let w = g.scale(1.0 / g_abs);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yw = w.conj() * *y;
                    let xp = *x;
                    *x = xp.scale(c) - yw.scale(s);
                    *y = xp.scale(s) + yw.scale(c);
                }
                norms[p] = (a - t * g_abs).max(0.0);
                norms[q] = b + t * g_abs;
            }
        }
        // Refresh to stop the running updates from drifting.
        for (nrm, c) in norms.iter_mut().zip(&cols) {
            *nrm = c.iter().map(|x| x.abs_sq()).sum();
        }
        if !rotated {
            return Ok(norms.into_iter().map(f64::sqrt).collect());
        }
        if sweep + 1 == MAX_SWEEPS {
            break;
        }
    }
    Err(Error::Numerical(format!(
        "one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps ({m}x{n})"
    )))
}

fn pair_mut<T>(v: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// Descending singular values of `a`, `min(rows, cols)` of them.
pub(crate) fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    // Work on whichever of A, A* has fewer columns.
    let transpose = a.rows() < a.cols();
    let (m, n) = if transpose { (a.cols(), a.rows()) } else { (a.rows(), a.cols()) };
    let entry = |i: usize, j: usize| if transpose { a.get(j, i).conj() } else { a.get(i, j) };

    let mut sv = if a.is_real() {
        let cols = (0..n).map(|j| (0..m).map(|i| entry(i, j).re).collect()).collect();
        one_sided::<f64>(cols)?
    } else {
        let cols = (0..n).map(|j| (0..m).map(|i| entry(i, j)).collect()).collect();
        one_sided::<C64>(cols)?
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Eigen-decomposition `H = V diag(λ) V*` of a Hermitian matrix by cyclic Jacobi.
///
/// The Hermitian part `(h + h*)/2` is what gets diagonalized.
pub(crate) fn hermitian_eigen(h: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = h.rows();
    if !h.is_square() {
        return Err(Error::Domain(format!("eigensolve needs a square matrix, got {}x{}", h.rows(), h.cols())));
    }
    if !h.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let mut b = DenseMatrix::from_fn(n, n, |r, c| (h.get(r, c) + h.get(c, r).conj()) * 0.5);
    let mut v = DenseMatrix::identity(n);
    let scale = b.frobenius_sq().sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let bpq = b.get(p, q);
                let mag = bpq.norm();
                let (bpp, bqq) = (b.get(p, p).re, b.get(q, q).re);
                if mag == 0.0 || mag <= REL_TOL * (bpp * bqq).abs().sqrt() || mag <= 1e-18 * scale {
                    continue;
                }
                rotated = true;
                let (c, s, _) = rotation(bpp, bqq, mag);
                let w = bpq / mag;
                // Columns: B <- B J with J = diag(1, conj(w)) [[c, s], [-s, c]] acting on (p, q).
                let wc = w.conj();
                for r in 0..n {
                    let (xp, xq) = (b.get(r, p), b.get(r, q));
                    b.set(r, p, xp * c - xq * wc * s);
                    b.set(r, q, xp * s + xq * wc * c);
                    let (vp, vq) = (v.get(r, p), v.get(r, q));
                    v.set(r, p, vp * c - vq * wc * s);
                    v.set(r, q, vp * s + vq * wc * c);
                }
                // Rows: B <- J* B.
                for col in 0..n {
                    let (xp, xq) = (b.get(p, col), b.get(q, col));
                    b.set(p, col, xp * c - xq * w * s);
                    b.set(q, col, xp * s + xq * w * c);
                }
                b.set(p, q, ZERO);
                b.set(q, p, ZERO);
            }
        }
        if !rotated {
            let vals = (0..n).map(|i| b.get(i, i).re).collect();
            return Ok((vals, v));
        }
    }
    Err(Error::Numerical(format!("Hermitian Jacobi did not converge in {MAX_SWEEPS} sweeps ({n}x{n})")))
}
