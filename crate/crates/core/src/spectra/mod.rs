//! Singular values: closed forms for α-circulants, the zero-shift reductions,
//! and the Jacobi oracle they are checked against.

pub(crate) mod jacobi;

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dense::{DenseMatrix, C64, ZERO};
use crate::error::{domain, Result};
use crate::index::{box_indices, rank_sizes, MultiIndex};
use crate::structured::gcd;
use crate::symbols::SymbolSpec;

pub use jacobi::{MAX_SWEEPS, REL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Oracle,
    Reduction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Descending, nonnegative.
    pub values: Vec<f64>,
    /// Number of trailing entries that vanish for structural (rank) reasons.
    pub structural_zero_count: usize,
    pub provenance: Provenance,
}

impl SpectrumResult {
    /// Sorts `candidates` descending and appends `zeros` exact zeros.
    pub fn from_candidates(mut candidates: Vec<f64>, zeros: usize, provenance: Provenance) -> Self {
        candidates.sort_by(|x, y| y.total_cmp(x));
        candidates.extend(std::iter::repeat(0.0).take(zeros));
        SpectrumResult { values: candidates, structural_zero_count: zeros, provenance }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|s| s * s).sum()
    }

    /// CSV with header `index,sigma,structural_zero`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,sigma,structural_zero\n");
        let first_zero = self.values.len() - self.structural_zero_count;
        for (i, s) in self.values.iter().enumerate() {
            writeln!(out, "{i},{s:?},{}", i >= first_zero).unwrap();
        }
        out
    }
}

/// Largest entrywise gap between two multisets after sorting both descending.
pub fn multiset_max_diff(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return domain(format!("multisets differ in size: {} vs {}", a.len(), b.len()));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| q.total_cmp(p));
    y.sort_by(|p, q| q.total_cmp(p));
    Ok(x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
}

/// Singular values by one-sided Jacobi.
pub fn svd_oracle(a: &DenseMatrix) -> Result<SpectrumResult> {
    let values = jacobi::singular_values(a)?;
    Ok(SpectrumResult { values, structural_zero_count: 0, provenance: Provenance::Oracle })
}

/// Eigenvalues (ascending) of the Hermitian part of `h`.
pub fn hermitian_eigenvalues(h: &DenseMatrix) -> Result<Vec<f64>> {
    let (mut vals, _) = jacobi::hermitian_eigen(h)?;
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigenvalues of a normal matrix, read off `v* A v` for the eigenvectors of a
/// generic real combination of its Hermitian and skew-Hermitian parts.
pub fn normal_eigenvalues(a: &DenseMatrix) -> Result<Vec<C64>> {
    if !a.is_square() {
        return domain(format!("eigenvalues need a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    let n = a.rows();
    let weight = std::f64::consts::FRAC_1_SQRT_2 * 1.1;
    let h = DenseMatrix::from_fn(n, n, |r, c| {
        let x = a.get(r, c);
        let y = a.get(c, r).conj();
        (x + y) * 0.5 + (x - y) * C64::new(0.0, -0.5 * weight)
    });
    let (_, v) = jacobi::hermitian_eigen(&h)?;
    let av = a.matmul(&v)?;
    Ok((0..n).map(|j| (0..n).map(|r| v.get(r, j).conj() * av.get(r, j)).sum()).collect())
}

/// `B^{1/2} = U Λ^{1/2} U*` for a Hermitian positive semidefinite `B`.
///
/// Eigenvalues at round-off level (below `8 n ε max|λ|`) are treated as zero, so
/// that a numerically singular `B` does not pick up `√ε`-sized noise.
pub fn psd_sqrt(b: &DenseMatrix) -> Result<DenseMatrix> {
    let (vals, u) = jacobi::hermitian_eigen(b)?;
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(v) = vals.iter().find(|&&v| v < -1e-10 * top.max(1.0)) {
        return domain(format!("matrix is not positive semidefinite (eigenvalue {v})"));
    }
    let floor = 8.0 * vals.len() as f64 * f64::EPSILON * top;
    let roots: Vec<C64> = vals
        .iter()
        .map(|&v| C64::new(if v <= floor { 0.0 } else { v.sqrt() }, 0.0))
        .collect();
    u.matmul(&DenseMatrix::diag(&roots))?.matmul(&u.adjoint())
}

/// `(Σ_j B_j* B_j)^{1/2}`.
pub fn gram_sqrt(blocks: &[DenseMatrix]) -> Result<DenseMatrix> {
    let Some(first) = blocks.first() else {
        return domain("gram square root needs at least one block");
    };
    let cols = first.cols();
    let mut gram = DenseMatrix::zeros(cols, cols);
    for b in blocks {
        if b.cols() != cols {
            return domain(format!("blocks have {} and {} columns", cols, b.cols()));
        }
        gram = gram.add(&b.adjoint().matmul(b)?)?;
    }
    psd_sqrt(&gram)
}

/// `√n̂ F_n* a`: the values `Σ_j a_j exp(2πi <j, s/n>)` over the box, lexicographic.
pub fn multilevel_circulant_eigs(a: &[C64], n: &MultiIndex) -> Result<Vec<C64>> {
    let sizes = n.sizes()?;
    let total: usize = sizes.iter().product();
    if a.len() != total {
        return domain(format!("expected {total} coefficients for sizes {n}, got {}", a.len()));
    }
    // Separable transform, one level at a time.
    let mut data = a.to_vec();
    let mut stride = total;
    for &m in &sizes {
        let inner = stride / m;
        let roots: Vec<C64> = (0..m).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
        let mut out = vec![ZERO; total];
        for outer in 0..total / stride {
            for i in 0..inner {
                let base = outer * stride + i;
                for s in 0..m {
                    let mut acc = ZERO;
                    for j in 0..m {
                        acc += data[base + j * inner] * roots[(j * s) % m];
                    }
                    out[base + s * inner] = acc;
                }
            }
        }
        data = out;
        stride = inner;
    }
    Ok(data)
}

/// Eigenvalues `p(2πj/n)`, `p(t) = Σ_k a_k exp(ikt)`, of the circulant with first column `a`.
pub fn circulant_eigs(a: &[C64], n: usize) -> Result<Vec<C64>> {
    multilevel_circulant_eigs(a, &MultiIndex::scalar(n as i64))
}

/// `d_s = |√n F_n* a|_s^2` with the fold geometry of `(n, α)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalFold {
    pub d_values: Vec<f64>,
    pub g: usize,
    pub n_alpha: usize,
}

impl DiagonalFold {
    pub fn new(a: &[C64], n: usize, alpha: usize) -> Result<Self> {
        let d_values = circulant_eigs(a, n)?.into_iter().map(|z| z.norm_sqr()).collect();
        let g = gcd(n, alpha % n);
        Ok(DiagonalFold { d_values, g, n_alpha: n / g })
    }

    /// `√(Σ_l d_{l n_α + j})` for `j < n_α`.
    pub fn folded(&self) -> Vec<f64> {
        (0..self.n_alpha)
            .map(|j| (0..self.g).map(|l| self.d_values[l * self.n_alpha + j]).sum::<f64>().sqrt())
            .collect()
    }
}

fn check_one_level(a: &[C64], n: usize) -> Result<()> {
    if n == 0 {
        return domain("size must be at least 1");
    }
    if a.len() != n {
        return domain(format!("expected {n} coefficients, got {}", a.len()));
    }
    Ok(())
}

fn zero_shift_spectrum(a: &[C64], provenance: Provenance) -> SpectrumResult {
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let n = a.len();
    SpectrumResult::from_candidates(vec![(n as f64).sqrt() * norm], n - 1, provenance)
}

/// Closed-form singular values of the one-level `C_{n,α}` from the folded `d_s`.
pub fn alpha_circulant_singvals(a: &[C64], n: usize, alpha: usize) -> Result<SpectrumResult> {
    check_one_level(a, n)?;
    if alpha % n == 0 {
        return Ok(zero_shift_spectrum(a, Provenance::ClosedForm));
    }
    let fold = DiagonalFold::new(a, n, alpha)?;
    Ok(SpectrumResult::from_candidates(fold.folded(), n - fold.n_alpha, Provenance::ClosedForm))
}

/// Same values through the symbol: `√(Σ_{l<g} |p|^2((x_j + 2πl)/g))`, `x_j = 2πj/n_α`.
pub fn alpha_circulant_singvals_symbol(a: &[C64], n: usize, alpha: usize) -> Result<SpectrumResult> {
    check_one_level(a, n)?;
    if alpha % n == 0 {
        return Ok(zero_shift_spectrum(a, Provenance::ClosedForm));
    }
    let g = gcd(n, alpha % n);
    let n_alpha = n / g;
    let p = |t: f64| -> C64 { a.iter().enumerate().map(|(k, &ak)| ak * C64::from_polar(1.0, k as f64 * t)).sum() };
    let values = (0..n_alpha)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / n_alpha as f64;
            (0..g).map(|l| p((x + 2.0 * PI * l as f64) / g as f64).norm_sqr()).sum::<f64>().sqrt()
        })
        .collect();
    Ok(SpectrumResult::from_candidates(values, n - n_alpha, Provenance::ClosedForm))
}

/// Multilevel `C_{n,α}` with every `α_k mod n_k` nonzero: the `d`-array is folded
/// independently on each level.
pub fn multilevel_alpha_circulant_singvals(a: &[C64], n: &MultiIndex, alpha: &MultiIndex) -> Result<SpectrumResult> {
    let sizes = n.sizes()?;
    let alphas = alpha.shifts()?;
    if alphas.len() != sizes.len() {
        return domain(format!("shift {alpha} does not have {} levels", sizes.len()));
    }
    if let Some(k) = (0..sizes.len()).find(|&k| alphas[k] % sizes[k] == 0) {
        return domain(format!("level {k} has a zero shift (mod n); use the zero-shift reduction"));
    }
    let d: Vec<f64> = multilevel_circulant_eigs(a, n)?.into_iter().map(|z| z.norm_sqr()).collect();
    let g: Vec<usize> = sizes.iter().zip(&alphas).map(|(&m, &al)| gcd(m, al % m)).collect();
    let n_alpha: Vec<usize> = sizes.iter().zip(&g).map(|(m, gk)| m / gk).collect();
    let folds: Vec<Vec<usize>> = box_indices(&g).collect();
    let mut idx = vec![0; sizes.len()];
    let values: Vec<f64> = box_indices(&n_alpha)
        .map(|t| {
            folds
                .iter()
                .map(|l| {
                    for k in 0..sizes.len() {
                        idx[k] = t[k] + l[k] * n_alpha[k];
                    }
                    d[rank_sizes(&idx, &sizes)]
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let total: usize = sizes.iter().product();
    let zeros = total - values.len();
    Ok(SpectrumResult::from_candidates(values, zeros, Provenance::ClosedForm))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    Circulant,
    Toeplitz,
}

/// Level split for a shift with zero components: zero levels first, in order.
struct LevelSplit {
    zero: Vec<usize>,
    pos: Vec<usize>,
}

impl LevelSplit {
    fn new(alphas: &[usize]) -> Self {
        let (zero, pos) = (0..alphas.len()).partition(|&k| alphas[k] == 0);
        LevelSplit { zero, pos }
    }
}

/// The blocks `C_j` (or `T_j`), one per `j` in the box of zero levels; each is
/// the structured matrix on the remaining levels with the zero-level index fixed to `j`.
pub fn zero_alpha_blocks(
    s: &SymbolSpec,
    n: &MultiIndex,
    alpha: &MultiIndex,
    kind: ReductionKind,
) -> Result<Vec<DenseMatrix>> {
    let sizes = n.sizes()?;
    let alphas = alpha.shifts()?;
    if alphas.len() != sizes.len() || s.d() != sizes.len() {
        return domain(format!("symbol, sizes {n} and shift {alpha} must have the same number of levels"));
    }
    let alphas: Vec<usize> = match kind {
        ReductionKind::Circulant => alphas.iter().zip(&sizes).map(|(&a, &m)| a % m).collect(),
        ReductionKind::Toeplitz => alphas,
    };
    let split = LevelSplit::new(&alphas);
    if split.zero.is_empty() {
        return domain(format!("shift {alpha} has no zero component; use the closed forms"));
    }
    let zero_sizes: Vec<usize> = split.zero.iter().map(|&k| sizes[k]).collect();
    let pos_sizes: Vec<usize> = split.pos.iter().map(|&k| sizes[k]).collect();
    let inner: Vec<Vec<usize>> = box_indices(&pos_sizes).collect();
    let m = inner.len();

    let mut blocks = Vec::new();
    let mut idx = vec![0i64; sizes.len()];
    for j in box_indices(&zero_sizes) {
        for (&k, &jk) in split.zero.iter().zip(&j) {
            idx[k] = jk as i64;
        }
        let block = DenseMatrix::from_fn(m, m, |r, c| {
            let mut full = idx.clone();
            for (p, &k) in split.pos.iter().enumerate() {
                let v = inner[r][p] as i64 - (alphas[k] * inner[c][p]) as i64;
                full[k] = match kind {
                    ReductionKind::Circulant => v.rem_euclid(sizes[k] as i64),
                    ReductionKind::Toeplitz => v,
                };
            }
            s.get(&full)
        });
        blocks.push(block);
    }
    Ok(blocks)
}

/// Singular values of a multilevel α-circulant or α-Toeplitz matrix whose shift has
/// zero components: `√n̂[0]` times the singular values of `(Σ_j C_j* C_j)^{1/2}`,
/// padded with zeros.
///
/// The singular values of `(Σ_j C_j* C_j)^{1/2}` are taken from the stacked matrix
/// `[C_0; C_1; ...]`, which has that Gram matrix; going through the explicit square
/// root would lose half the digits of the small values.
///
/// For the circulant kind, coefficients are read on the box `0 <= j < n` and shift
/// components are reduced modulo `n`.
pub fn zero_alpha_reduction(
    s: &SymbolSpec,
    n: &MultiIndex,
    alpha: &MultiIndex,
    kind: ReductionKind,
) -> Result<SpectrumResult> {
    let blocks = zero_alpha_blocks(s, n, alpha, kind)?;
    let total = n.product() as usize;
    let inner = blocks[0].rows();
    let scale = (blocks.len() as f64).sqrt();
    let stacked = DenseMatrix::from_fn(inner * blocks.len(), inner, |r, c| blocks[r / inner].get(r % inner, c));
    let values = svd_oracle(&stacked)?.values.into_iter().map(|v| scale * v).collect();
    Ok(SpectrumResult::from_candidates(values, total - inner, Provenance::Reduction))
}

/// Closed form for a multilevel α-circulant whose only nonzero shift is on level `k`.
pub fn single_nonzero_alpha_singvals(a: &[C64], n: &MultiIndex, k: usize, alpha_k: usize) -> Result<SpectrumResult> {
    let sizes = n.sizes()?;
    let total: usize = sizes.iter().product();
    if a.len() != total {
        return domain(format!("expected {total} coefficients for sizes {n}, got {}", a.len()));
    }
    if k >= sizes.len() {
        return domain(format!("level {k} out of range for {} levels", sizes.len()));
    }
    let nk = sizes[k];
    if alpha_k % nk == 0 {
        let mut alpha = MultiIndex::zeros(sizes.len()).into_vec();
        alpha[k] = alpha_k as i64;
        return zero_alpha_reduction(&SymbolSpec::from_box_vector(a, n)?, n, &MultiIndex::new(alpha), ReductionKind::Circulant);
    }
    let g = gcd(nk, alpha_k % nk);
    let n_alpha = nk / g;

    let outer: Vec<usize> = sizes.iter().enumerate().filter(|&(l, _)| l != k).map(|(_, &m)| m).collect();
    let mut q_sum = vec![0.0; nk];
    let mut idx = vec![0usize; sizes.len()];
    for j in box_indices(&outer) {
        let mut it = j.iter();
        for (l, slot) in idx.iter_mut().enumerate() {
            if l != k {
                *slot = *it.next().unwrap();
            }
        }
        let line: Vec<C64> = (0..nk)
            .map(|m| {
                idx[k] = m;
                a[rank_sizes(&idx, &sizes)]
            })
            .collect();
        for (acc, z) in q_sum.iter_mut().zip(circulant_eigs(&line, nk)?) {
            *acc += z.norm_sqr();
        }
    }
    let scale = ((total / nk) as f64).sqrt();
    let values = (0..n_alpha)
        .map(|t| scale * (0..g).map(|l| q_sum[l * n_alpha + t]).sum::<f64>().sqrt())
        .collect();
    Ok(SpectrumResult::from_candidates(values, total - n_alpha, Provenance::ClosedForm))
}

/// Singular values of the multilevel `C_{n,α}` through whichever formula applies.
pub fn alpha_circulant_spectrum(a: &[C64], n: &MultiIndex, alpha: &MultiIndex) -> Result<SpectrumResult> {
    let sizes = n.sizes()?;
    let alphas = alpha.shifts()?;
    if alphas.len() != sizes.len() {
        return domain(format!("shift {alpha} does not have {} levels", sizes.len()));
    }
    let reduced: Vec<usize> = alphas.iter().zip(&sizes).map(|(&a, &m)| a % m).collect();
    let nonzero: Vec<usize> = (0..sizes.len()).filter(|&k| reduced[k] != 0).collect();
    if sizes.len() == 1 {
        return alpha_circulant_singvals(a, sizes[0], alphas[0]);
    }
    if nonzero.len() == sizes.len() {
        return multilevel_alpha_circulant_singvals(a, n, alpha);
    }
    if nonzero.len() == 1 {
        let k = nonzero[0];
        return single_nonzero_alpha_singvals(a, n, k, reduced[k]);
    }
    zero_alpha_reduction(&SymbolSpec::from_box_vector(a, n)?, n, alpha, ReductionKind::Circulant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::ONE;
    use crate::structured::{alpha_circulant, alpha_toeplitz, circulant};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn wobbly(n: usize, phase: f64) -> Vec<C64> {
        (0..n)
            .map(|k| C64::new((1.7 * k as f64 + phase).sin(), (0.9 * k as f64 * phase).cos() - 0.3))
            .collect()
    }

    fn assert_multiset(a: &[f64], b: &[f64], tol: f64) {
        let d = multiset_max_diff(a, b).unwrap();
        assert!(d <= tol, "multisets differ by {d}\n{a:?}\n{b:?}");
    }

    #[test]
    fn oracle_examples() {
        let id = svd_oracle(&DenseMatrix::identity(6)).unwrap();
        assert_eq!(id.values, vec![1.0; 6]);
        let d = svd_oracle(&DenseMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, -4.0]).unwrap()).unwrap();
        assert_eq!(d.values, vec![4.0, 3.0]);
        let nil = svd_oracle(&DenseMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(nil.values, vec![1.0, 0.0]);
        let wide = svd_oracle(&DenseMatrix::from_real(1, 3, &[3.0, 0.0, 4.0]).unwrap()).unwrap();
        assert_eq!(wide.values, vec![5.0]);
    }

    #[test]
    fn circulant_eig_examples() {
        assert_eq!(circulant_eigs(&[c(3.0), ZERO, ZERO, ZERO], 4).unwrap(), vec![c(3.0); 4]);
        let e = circulant_eigs(&[ZERO, ONE], 2).unwrap();
        assert!((e[0] - ONE).norm() < 1e-15 && (e[1] + ONE).norm() < 1e-15);

        let a = wobbly(8, 0.4);
        let closed = circulant_eigs(&a, 8).unwrap();
        let built = circulant(&a, &mi(&[8])).unwrap().matrix;
        let mut oracle = normal_eigenvalues(&built).unwrap();
        for z in &closed {
            let (pos, dist) = oracle
                .iter()
                .enumerate()
                .map(|(i, w)| (i, (w - z).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(dist < 1e-10, "eigenvalue {z} unmatched ({dist})");
            oracle.remove(pos);
        }
    }

    #[test]
    fn alpha_circulant_examples() {
        let a = wobbly(7, 1.1);
        let s = alpha_circulant_singvals(&a, 7, 1).unwrap();
        let moduli: Vec<f64> = circulant_eigs(&a, 7).unwrap().iter().map(|z| z.norm()).collect();
        assert_multiset(&s.values, &moduli, 1e-12);

        let a = vec![ONE, ONE, ZERO, ZERO];
        let s = alpha_circulant_singvals(&a, 4, 2).unwrap();
        assert_multiset(&s.values, &[2.0, 2.0, 0.0, 0.0], 1e-14);
        assert_eq!(s.structural_zero_count, 2);
        let sym = alpha_circulant_singvals_symbol(&a, 4, 2).unwrap();
        assert!((sym.values[0] - 2.0).abs() < 1e-14);

        let a = wobbly(5, 0.2);
        let closed = alpha_circulant_singvals(&a, 5, 3).unwrap();
        let m = alpha_circulant(&a, &mi(&[5]), &mi(&[3])).unwrap().matrix;
        assert_multiset(&closed.values, &svd_oracle(&m).unwrap().values, 1e-10);
    }

    #[test]
    fn zero_shift_one_level() {
        let a = wobbly(6, 0.8);
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for alpha in [0, 6, 12] {
            let s = alpha_circulant_singvals(&a, 6, alpha).unwrap();
            assert!((s.values[0] - 6f64.sqrt() * norm).abs() < 1e-12);
            assert_eq!(s.structural_zero_count, 5);
        }
        let r = zero_alpha_reduction(&SymbolSpec::from_box_vector(&a, &mi(&[6])).unwrap(), &mi(&[6]), &mi(&[0]), ReductionKind::Circulant)
            .unwrap();
        assert!((r.values[0] - 6f64.sqrt() * norm).abs() < 1e-12);
        assert_eq!(r.provenance, Provenance::Reduction);
    }

    #[test]
    fn gram_sqrt_examples() {
        let id = gram_sqrt(&[DenseMatrix::identity(3)]).unwrap();
        assert!(id.max_abs_diff(&DenseMatrix::identity(3)).unwrap() < 1e-15);
        let two = gram_sqrt(&[DenseMatrix::from_real(1, 1, &[2.0]).unwrap()]).unwrap();
        assert!((two.get(0, 0) - c(2.0)).norm() < 1e-15);
        let b1 = DenseMatrix::from_fn(3, 3, |r, col| C64::new((r * 3 + col) as f64 - 4.0, (r as f64 - col as f64) * 0.5));
        let b2 = DenseMatrix::from_fn(3, 3, |r, col| C64::new(((r + 2 * col) % 3) as f64, 1.0));
        let root = gram_sqrt(&[b1.clone(), b2.clone()]).unwrap();
        let gram = b1.adjoint().matmul(&b1).unwrap().add(&b2.adjoint().matmul(&b2).unwrap()).unwrap();
        assert!(root.matmul(&root).unwrap().max_abs_diff(&gram).unwrap() < 1e-10);
        assert!(root.max_abs_diff(&root.adjoint()).unwrap() < 1e-12);
        assert!(hermitian_eigenvalues(&root).unwrap()[0] >= -1e-12);
        assert!(gram_sqrt(&[]).is_err());
        assert!(gram_sqrt(&[b1, DenseMatrix::identity(2)]).is_err());
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let m = DenseMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(psd_sqrt(&m).is_err());
    }

    #[test]
    fn multilevel_examples() {
        let n = mi(&[2, 3]);
        let a = wobbly(6, 0.5);
        let s = multilevel_alpha_circulant_singvals(&a, &n, &mi(&[1, 1])).unwrap();
        let mut direct = Vec::new();
        for k1 in 0..2 {
            for k2 in 0..3 {
                let mut acc = ZERO;
                for j1 in 0..2 {
                    for j2 in 0..3 {
                        let ph = 2.0 * PI * (j1 as f64 * k1 as f64 / 2.0 + j2 as f64 * k2 as f64 / 3.0);
                        acc += a[j1 * 3 + j2] * C64::from_polar(1.0, ph);
                    }
                }
                direct.push(acc.norm());
            }
        }
        assert_multiset(&s.values, &direct, 1e-12);

        let n = mi(&[4, 6]);
        let a = wobbly(24, 0.3);
        let closed = multilevel_alpha_circulant_singvals(&a, &n, &mi(&[2, 3])).unwrap();
        let m = alpha_circulant(&a, &n, &mi(&[2, 3])).unwrap().matrix;
        assert_multiset(&closed.values, &svd_oracle(&m).unwrap().values, 1e-10);
        assert_eq!(closed.structural_zero_count, 24 - 2 * 2);
    }

    #[test]
    fn separable_product_structure() {
        let (u, v) = (wobbly(4, 0.7), wobbly(6, 1.9));
        let a: Vec<C64> = u.iter().flat_map(|&x| v.iter().map(move |&y| x * y)).collect();
        let s = multilevel_alpha_circulant_singvals(&a, &mi(&[4, 6]), &mi(&[2, 4])).unwrap();
        let su = alpha_circulant_singvals(&u, 4, 2).unwrap().values;
        let sv = alpha_circulant_singvals(&v, 6, 4).unwrap().values;
        let products: Vec<f64> = su.iter().flat_map(|&x| sv.iter().map(move |&y| x * y)).collect();
        assert_multiset(&s.values, &products, 1e-12);
    }

    #[test]
    fn single_nonzero_examples() {
        for (n, alpha) in [(mi(&[3, 4]), 2usize), (mi(&[2, 4]), 1)] {
            let a = wobbly(n.product() as usize, 0.6);
            let closed = single_nonzero_alpha_singvals(&a, &n, 1, alpha).unwrap();
            let m = alpha_circulant(&a, &n, &mi(&[0, alpha as i64])).unwrap().matrix;
            assert_multiset(&closed.values, &svd_oracle(&m).unwrap().values, 1e-10);
        }
        // Nonzero level first.
        let n = mi(&[4, 3]);
        let a = wobbly(12, 1.3);
        let closed = single_nonzero_alpha_singvals(&a, &n, 0, 3).unwrap();
        let m = alpha_circulant(&a, &n, &mi(&[3, 0])).unwrap().matrix;
        assert_multiset(&closed.values, &svd_oracle(&m).unwrap().values, 1e-10);
        // α_k = n_k is fully degenerate.
        let n = mi(&[3, 4]);
        let a = wobbly(12, 0.1);
        let s = single_nonzero_alpha_singvals(&a, &n, 1, 4).unwrap();
        assert_eq!(s.structural_zero_count, 11);
    }

    #[test]
    fn zero_reduction_three_level_examples() {
        let n = mi(&[2, 3, 4]);
        let a = wobbly(24, 0.9);
        let spec = SymbolSpec::from_box_vector(&a, &n).unwrap();
        let alpha = mi(&[1, 2, 0]);
        let r = zero_alpha_reduction(&spec, &n, &alpha, ReductionKind::Circulant).unwrap();
        let m = alpha_circulant(&a, &n, &alpha).unwrap().matrix;
        assert_multiset(&r.values, &svd_oracle(&m).unwrap().values, 1e-10);
        assert_eq!(r.structural_zero_count, 24 - 6);

        let mut sym = SymbolSpec::new(3);
        for j1 in -2..=2 {
            for j2 in -3..=3 {
                for j3 in -7..=4 {
                    let v = C64::new(((j1 * 7 + j2 * 3 + j3) as f64 * 0.37).sin(), (j3 as f64 * 0.21).cos());
                    sym.add(mi(&[j1, j2, j3]), v).unwrap();
                }
            }
        }
        let alpha = mi(&[0, 1, 2]);
        let r = zero_alpha_reduction(&sym, &n, &alpha, ReductionKind::Toeplitz).unwrap();
        let m = alpha_toeplitz(&sym, &n, &alpha).unwrap().matrix;
        assert_multiset(&r.values, &svd_oracle(&m).unwrap().values, 1e-10);
        assert_eq!(r.structural_zero_count, 24 - 12);

        assert!(zero_alpha_reduction(&sym, &n, &mi(&[1, 1, 2]), ReductionKind::Toeplitz).is_err());
    }

    #[test]
    fn reduction_agrees_with_gram_root() {
        let n = mi(&[3, 4]);
        let a = wobbly(12, 0.45);
        let spec = SymbolSpec::from_box_vector(&a, &n).unwrap();
        let alpha = mi(&[0, 3]);
        let r = zero_alpha_reduction(&spec, &n, &alpha, ReductionKind::Circulant).unwrap();
        let blocks = zero_alpha_blocks(&spec, &n, &alpha, ReductionKind::Circulant).unwrap();
        let root = svd_oracle(&gram_sqrt(&blocks).unwrap()).unwrap();
        let scaled: Vec<f64> = root.values.iter().map(|v| 3f64.sqrt() * v).collect();
        assert_multiset(&r.values[..4], &scaled, 1e-10);
    }

    #[test]
    fn dispatcher_routes_all_patterns() {
        let n = mi(&[2, 3, 4]);
        let a = wobbly(24, 0.35);
        for alpha in [[1, 2, 3], [0, 2, 3], [2, 0, 0], [0, 0, 0], [3, 1, 8], [1, 1, 1], [0, 3, 5]] {
            let alpha = mi(&alpha);
            let s = alpha_circulant_spectrum(&a, &n, &alpha).unwrap();
            let m = alpha_circulant(&a, &n, &alpha).unwrap().matrix;
            assert_multiset(&s.values, &svd_oracle(&m).unwrap().values, 1e-10);
        }
    }

    #[test]
    fn csv_marks_structural_zeros() {
        let s = SpectrumResult::from_candidates(vec![1.0, 2.0], 1, Provenance::ClosedForm);
        assert_eq!(s.to_csv(), "index,sigma,structural_zero\n0,2.0,false\n1,1.0,false\n2,0.0,true\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coeffs(n: usize) -> impl Strategy<Value = Vec<C64>> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
                .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
        }

        fn case() -> impl Strategy<Value = (usize, usize, Vec<C64>)> {
            (1usize..=16).prop_flat_map(|n| (Just(n), 0..=n + 3, coeffs(n)))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn sorted_nonnegative_and_frobenius((n, alpha, a) in case()) {
                let s = alpha_circulant_singvals(&a, n, alpha).unwrap();
                prop_assert_eq!(s.len(), n);
                prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
                prop_assert!(s.values.iter().all(|&v| v >= 0.0));
                let m = alpha_circulant(&a, &mi(&[n as i64]), &mi(&[alpha as i64])).unwrap().matrix;
                let fro = m.frobenius_sq();
                prop_assert!((s.sum_of_squares() - fro).abs() <= 1e-10 * fro.max(1.0));
                for v in &s.values[n - s.structural_zero_count..] {
                    prop_assert_eq!(*v, 0.0);
                }
            }

            #[test]
            fn symbol_path_matches_fold((n, alpha, a) in case()) {
                let x = alpha_circulant_singvals(&a, n, alpha).unwrap();
                let y = alpha_circulant_singvals_symbol(&a, n, alpha).unwrap();
                prop_assert!(multiset_max_diff(&x.values, &y.values).unwrap() < 1e-10);
            }

            #[test]
            fn oracle_invariant_under_reordering(a in coeffs(9), perm_seed in any::<u64>()) {
                let m = alpha_circulant(&a, &mi(&[9]), &mi(&[3])).unwrap().matrix;
                let base = svd_oracle(&m).unwrap();
                // Row permutation does not change singular values.
                let shift = (perm_seed % 9) as usize;
                let p = DenseMatrix::from_fn(9, 9, |r, c| m.get((r + shift) % 9, c));
                prop_assert!(multiset_max_diff(&base.values, &svd_oracle(&p).unwrap().values).unwrap() < 1e-12);
            }
        }
    }
}
