//! Matrix constructors: shift/selection matrices, Fourier matrices,
//! (α-)circulants, (α-)Toeplitz matrices, and the head/tail splitting of a
//! one-level α-Toeplitz matrix.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dense::{DenseMatrix, MatrixKind, StructuredMatrix, C64, ONE, ZERO};
use crate::error::{domain, Result};
use crate::index::{box_indices, rank_sizes, unrank_sizes, MultiIndex};
use crate::symbols::SymbolSpec;

/// `α mod n`. `Z_{n,α}` and `C_{n,α}` only depend on this residue.
pub fn reduce_alpha(alpha: usize, n: usize) -> usize {
    alpha % n
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftVariant {
    /// `Z_{n,α}`, n x n.
    Full,
    /// `Z̃_{n,α}`, the first `n_α` columns.
    FirstNalpha,
    /// `Ẑ_{n,α}`, the first `μ_α = ⌈n/α⌉` columns.
    FirstMu,
    /// `𝒵_{d,α}`: the first `n - μ_α` columns of `Z_{d,α}`.
    TailCols { d_tail: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftPattern {
    pub n: MultiIndex,
    pub alpha: MultiIndex,
    pub variant: ShiftVariant,
}

impl ShiftPattern {
    pub fn new(n: MultiIndex, alpha: MultiIndex, variant: ShiftVariant) -> Self {
        ShiftPattern { n, alpha, variant }
    }

    pub fn one_level(n: usize, alpha: usize, variant: ShiftVariant) -> Self {
        ShiftPattern::new(MultiIndex::scalar(n as i64), MultiIndex::scalar(alpha as i64), variant)
    }
}

/// One-level `[δ_{r-αs}]` with `rows` rows and the first `cols` columns,
/// `δ_k = 1` iff `k ≡ 0 (mod rows)`.
fn z_columns(rows: usize, alpha: usize, cols: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for s in 0..cols {
        m.set((alpha * s) % rows, s, ONE);
    }
    m
}

pub fn shift_matrix(p: &ShiftPattern) -> Result<DenseMatrix> {
    let sizes = p.n.sizes()?;
    let alphas = p.alpha.shifts()?;
    if sizes.len() != alphas.len() {
        return domain(format!("size vector {} and shift {} differ in length", p.n, p.alpha));
    }
    match p.variant {
        ShiftVariant::Full | ShiftVariant::FirstNalpha => {
            let mut out = DenseMatrix::identity(1);
            for (&n, &a) in sizes.iter().zip(&alphas) {
                let cols = match p.variant {
                    ShiftVariant::Full => n,
                    _ => n / gcd(n, a),
                };
                out = out.kron(&z_columns(n, a, cols));
            }
            Ok(out)
        }
        ShiftVariant::FirstMu | ShiftVariant::TailCols { .. } => {
            if sizes.len() != 1 {
                return domain("head/tail selection matrices are one-level only");
            }
            let (n, a) = (sizes[0], alphas[0]);
            if a == 0 {
                return domain("head/tail selection matrices need a positive shift");
            }
            let mu = n.div_ceil(a);
            match p.variant {
                ShiftVariant::FirstMu => Ok(z_columns(n, a, mu)),
                ShiftVariant::TailCols { d_tail } => {
                    if d_tail == 0 || a * (n - mu).saturating_sub(1) >= d_tail {
                        return domain(format!("tail size {d_tail} too small for n={n}, alpha={a}"));
                    }
                    Ok(z_columns(d_tail, a, n - mu))
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Fold geometry of a one-level `(n, α)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdData {
    /// `(n, α)`
    pub g: usize,
    pub n_alpha: usize,
    pub alpha_check: usize,
    pub mu_alpha: usize,
    pub d_tail: usize,
}

pub fn gcd_data(n: usize, alpha: usize) -> Result<GcdData> {
    if n == 0 {
        return domain("size must be at least 1");
    }
    if alpha == 0 {
        return domain("gcd data needs a positive shift; zero shifts use the zero-shift reduction");
    }
    let g = gcd(n, alpha);
    // αn satisfies the strict bound except in a few tiny cases.
    let d_tail = (alpha * n).max((alpha - 1) * (n - 1) + 3);
    Ok(GcdData { g, n_alpha: n / g, alpha_check: alpha / g, mu_alpha: n.div_ceil(alpha), d_tail })
}

/// `F_n` with entries `exp(-2πi jk/n)/√n`, Kronecker product over levels.
pub fn fourier_matrix(n: &MultiIndex) -> Result<DenseMatrix> {
    let sizes = n.sizes()?;
    let mut out = DenseMatrix::identity(1);
    for &m in &sizes {
        let scale = 1.0 / (m as f64).sqrt();
        let f = DenseMatrix::from_fn(m, m, |j, k| {
            let phase = -2.0 * PI * ((j * k) % m) as f64 / m as f64;
            C64::from_polar(scale, phase)
        });
        out = out.kron(&f);
    }
    Ok(out)
}

fn check_vector(a: &[C64], n: &MultiIndex) -> Result<Vec<usize>> {
    let sizes = n.sizes()?;
    let total: usize = sizes.iter().product();
    if a.len() != total {
        return domain(format!("expected {total} coefficients for sizes {n}, got {}", a.len()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return domain("coefficients must be finite");
    }
    Ok(sizes)
}

fn check_alpha(alpha: &MultiIndex, d: usize) -> Result<Vec<usize>> {
    if alpha.len() != d {
        return domain(format!("shift {alpha} does not have {d} levels"));
    }
    alpha.shifts()
}

/// `[a_{(r-s) mod n}]` from the first column `a` (lexicographic over the box).
pub fn circulant(a: &[C64], n: &MultiIndex) -> Result<StructuredMatrix> {
    let mut m = alpha_circulant(a, n, &MultiIndex::ones(n.len()))?;
    m.kind = MatrixKind::Circulant;
    m.alpha = None;
    Ok(m)
}

/// `F_n diag(√n̂ F_n* a) F_n*`.
pub fn circulant_fourier_form(a: &[C64], n: &MultiIndex) -> Result<DenseMatrix> {
    let sizes = check_vector(a, n)?;
    let total: usize = sizes.iter().product();
    let f = fourier_matrix(n)?;
    let fa = f.adjoint();
    let col = DenseMatrix::from_vec(total, 1, a.to_vec())?;
    let d = fa.matmul(&col)?.scale(C64::new((total as f64).sqrt(), 0.0));
    f.matmul(&DenseMatrix::diag(d.data()))?.matmul(&fa)
}

/// `[a_{(r-α∘s) mod n}]`.
pub fn alpha_circulant(a: &[C64], n: &MultiIndex, alpha: &MultiIndex) -> Result<StructuredMatrix> {
    let sizes = check_vector(a, n)?;
    let alphas = check_alpha(alpha, sizes.len())?;
    let total: usize = sizes.iter().product();
    let idx: Vec<Vec<usize>> = box_indices(&sizes).collect();
    let mut m = DenseMatrix::zeros(total, total);
    let mut entry = vec![0usize; sizes.len()];
    for (r, ri) in idx.iter().enumerate() {
        for (s, si) in idx.iter().enumerate() {
            for k in 0..sizes.len() {
                let nk = sizes[k];
                entry[k] = (ri[k] + nk - (alphas[k] % nk) * si[k] % nk) % nk;
            }
            m.set(r, s, a[rank_sizes(&entry, &sizes)]);
        }
    }
    Ok(StructuredMatrix::new(m, MatrixKind::AlphaCirculant, n.clone(), Some(alpha.clone())))
}

/// `[a_{r-α∘c}]` with indices not reduced; absent coefficients read as zero.
pub fn alpha_toeplitz(s: &SymbolSpec, n: &MultiIndex, alpha: &MultiIndex) -> Result<StructuredMatrix> {
    let sizes = n.sizes()?;
    if s.d() != sizes.len() {
        return domain(format!("symbol has {} levels but sizes {n} have {}", s.d(), sizes.len()));
    }
    let alphas = check_alpha(alpha, sizes.len())?;
    let lo: Vec<i64> = sizes.iter().zip(&alphas).map(|(&n, &a)| -((a * (n - 1)) as i64)).collect();
    let hi: Vec<i64> = sizes.iter().map(|&n| n as i64 - 1).collect();
    let table = s.dense_table(&lo, &hi);
    let total: usize = sizes.iter().product();
    let idx: Vec<Vec<usize>> = box_indices(&sizes).collect();
    let mut m = DenseMatrix::zeros(total, total);
    let mut entry = vec![0i64; sizes.len()];
    for (r, ri) in idx.iter().enumerate() {
        for (c, ci) in idx.iter().enumerate() {
            for k in 0..sizes.len() {
                entry[k] = ri[k] as i64 - (alphas[k] * ci[k]) as i64;
            }
            m.set(r, c, table.get(&entry));
        }
    }
    Ok(StructuredMatrix::new(m, MatrixKind::AlphaToeplitz, n.clone(), Some(alpha.clone())))
}

/// Ordinary (multilevel) Toeplitz `[a_{r-c}]`.
pub fn toeplitz(s: &SymbolSpec, n: &MultiIndex) -> Result<StructuredMatrix> {
    let mut m = alpha_toeplitz(s, n, &MultiIndex::ones(n.len()))?;
    m.kind = MatrixKind::Toeplitz;
    m.alpha = None;
    Ok(m)
}

/// Flip matrix `J`: ones on the anti-diagonal.
pub fn flip_matrix(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |r, c| if r + c + 1 == n { ONE } else { ZERO })
}

/// `I_{n,α}`: `(n, α)` copies of `I_{n_α}` stacked vertically.
pub fn stacked_identity(n: usize, alpha: usize) -> Result<DenseMatrix> {
    let gd = gcd_data(n, alpha)?;
    Ok(DenseMatrix::from_fn(n, gd.n_alpha, |r, c| if r % gd.n_alpha == c { ONE } else { ZERO }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierShiftResiduals {
    /// `F_n Z̃_{n,α}` against `(n,α)^{-1/2} I_{n,α} F_{n_α} Z_{n_α,α̌}`.
    pub fourier: f64,
    /// `Z̃_{n,α}` against `Z̃_{n,(n,α)} Z_{n_α,α̌}`.
    pub factorization: f64,
}

pub fn verify_fourier_shift_identity(n: usize, alpha: usize) -> Result<FourierShiftResiduals> {
    if alpha == 0 || alpha >= n {
        return domain(format!("identity check needs 1 <= alpha < n, got n={n}, alpha={alpha}"));
    }
    let gd = gcd_data(n, alpha)?;
    let zt = shift_matrix(&ShiftPattern::one_level(n, alpha, ShiftVariant::FirstNalpha))?;
    let z_small = shift_matrix(&ShiftPattern::one_level(gd.n_alpha, gd.alpha_check, ShiftVariant::Full))?;

    let lhs = fourier_matrix(&MultiIndex::scalar(n as i64))?.matmul(&zt)?;
    let rhs = stacked_identity(n, alpha)?
        .matmul(&fourier_matrix(&MultiIndex::scalar(gd.n_alpha as i64))?)?
        .matmul(&z_small)?
        .scale(C64::new(1.0 / (gd.g as f64).sqrt(), 0.0));

    let zt_g = shift_matrix(&ShiftPattern::one_level(n, gd.g, ShiftVariant::FirstNalpha))?;
    let factorization = zt.max_abs_diff(&zt_g.matmul(&z_small)?)?;
    Ok(FourierShiftResiduals { fourier: lhs.max_abs_diff(&rhs)?, factorization })
}

fn one_level(n: usize, alpha: usize) -> (MultiIndex, MultiIndex) {
    (MultiIndex::scalar(n as i64), MultiIndex::scalar(alpha as i64))
}

/// Splits `T_{n,α} = [T_n Ẑ_{n,α} | 𝒯_{n,α}]` into the head (first `μ_α` columns,
/// formed as the product) and the tail.
pub fn toeplitz_tail_split(s: &SymbolSpec, n: usize, alpha: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    if s.d() != 1 {
        return domain("head/tail split is one-level only");
    }
    let gd = gcd_data(n, alpha)?;
    let (nn, aa) = one_level(n, alpha);
    let t = toeplitz(s, &nn)?.matrix;
    let zhat = shift_matrix(&ShiftPattern::one_level(n, alpha, ShiftVariant::FirstMu))?;
    let head = t.matmul(&zhat)?;
    let full = alpha_toeplitz(s, &nn, &aa)?.matrix;
    let tail = full.columns(gd.mu_alpha, n - gd.mu_alpha)?;
    Ok((head, tail))
}

/// `T_d = [a_{r-c-d+1}]`, d x d.
pub fn tail_toeplitz(s: &SymbolSpec, d_tail: usize) -> DenseMatrix {
    let shift = d_tail as i64 - 1;
    DenseMatrix::from_fn(d_tail, d_tail, |r, c| s.get(&[r as i64 - c as i64 - shift]))
}

/// `H_d = [a_{-r-c}]`, d x d.
pub fn tail_hankel(s: &SymbolSpec, d_tail: usize) -> DenseMatrix {
    DenseMatrix::from_fn(d_tail, d_tail, |r, c| s.get(&[-(r as i64) - c as i64]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailResiduals {
    /// Tail block against `[0_1 | I_n | 0_2] T_d 𝒵_{d,α}`.
    pub embedding: f64,
    /// `T_d` against `J H_d`.
    pub flip: f64,
}

pub fn tail_embedding(s: &SymbolSpec, n: usize, alpha: usize, d_tail: usize) -> Result<TailResiduals> {
    if alpha == 0 {
        return domain("tail embedding needs a positive shift");
    }
    if d_tail as i64 <= (alpha as i64 - 1) * (n as i64 - 1) + 2 {
        return domain(format!(
            "tail size {d_tail} must exceed (alpha-1)(n-1)+2 = {}",
            (alpha - 1) * (n - 1) + 2
        ));
    }
    let gd = gcd_data(n, alpha)?;
    let td = tail_toeplitz(s, d_tail);
    let flip = td.max_abs_diff(&flip_matrix(d_tail).matmul(&tail_hankel(s, d_tail))?)?;

    let (_, tail) = toeplitz_tail_split(s, n, alpha)?;
    if tail.cols() == 0 {
        return Ok(TailResiduals { embedding: 0.0, flip });
    }
    let offset = (d_tail as i64) - (alpha * gd.mu_alpha) as i64 - 1;
    if offset < 0 || offset as usize + n > d_tail {
        return domain(format!("tail size {d_tail} leaves no room for the selection block"));
    }
    let offset = offset as usize;
    let select = DenseMatrix::from_fn(n, d_tail, |r, c| if c == r + offset { ONE } else { ZERO });
    let zcal = shift_matrix(&ShiftPattern::one_level(n, alpha, ShiftVariant::TailCols { d_tail }))?;
    let rhs = select.matmul(&td)?.matmul(&zcal)?;
    Ok(TailResiduals { embedding: tail.max_abs_diff(&rhs)?, flip })
}

/// `PᵀAP` reordering the levels so that new level `i` is old level `perm[i]`.
pub fn permute_levels(a: &StructuredMatrix, perm: &[usize]) -> Result<StructuredMatrix> {
    let sizes = a.n.sizes()?;
    let d = sizes.len();
    let mut seen = vec![false; d];
    if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
        return domain(format!("{perm:?} is not a permutation of {d} levels"));
    }
    let total: usize = sizes.iter().product();
    if a.matrix.rows() != total || a.matrix.cols() != total {
        return domain(format!("matrix is not {total}x{total}"));
    }
    let new_sizes: Vec<usize> = perm.iter().map(|&p| sizes[p]).collect();
    // old_of[new position] = old position
    let old_of: Vec<usize> = (0..total)
        .map(|pos| {
            let new_idx = unrank_sizes(pos, &new_sizes);
            let mut old_idx = vec![0; d];
            for (i, &p) in perm.iter().enumerate() {
                old_idx[p] = new_idx[i];
            }
            rank_sizes(&old_idx, &sizes)
        })
        .collect();
    let m = DenseMatrix::from_fn(total, total, |r, c| a.matrix.get(old_of[r], old_of[c]));
    let n = MultiIndex::from_sizes(&new_sizes);
    let alpha = a.alpha.as_ref().map(|al| al.select(perm));
    Ok(StructuredMatrix::new(m, a.kind, n, alpha))
}
