//! Coarse-grid operators `A_k = Z̃ᵀ P* A P Z̃` of circulant systems.
//!
//! `A = C_n(f)` and `P = C_n(q)` are circulants built from symbols (coefficients
//! aliased onto `0..n`), so `P* A P` has symbol `g = |q|^2 f` and `A_k` is the
//! circulant whose eigenvalues fold `g` over the coarse grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dense::{DenseMatrix, MatrixKind, StructuredMatrix};
use crate::error::{domain, Result};
use crate::index::MultiIndex;
use crate::spectra::{
    circulant_eigs, hermitian_eigenvalues, multiset_max_diff, psd_sqrt, svd_oracle, Provenance, SpectrumResult,
};
use crate::structured::{circulant, gcd, shift_matrix, ShiftPattern, ShiftVariant};
use crate::symbols::{autocorrelate, eval_symbol, SymbolSpec};

/// Eigenvalues of `A_n` may dip this far below zero.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSetup {
    pub n: usize,
    pub alpha: usize,
    pub a_fine: SymbolSpec,
    pub p_coeffs: SymbolSpec,
}

impl ProjectionSetup {
    pub fn new(n: usize, alpha: usize, a_fine: SymbolSpec, p_coeffs: SymbolSpec) -> Self {
        ProjectionSetup { n, alpha, a_fine, p_coeffs }
    }

    fn size(&self) -> MultiIndex {
        MultiIndex::scalar(self.n as i64)
    }

    fn validate(&self) -> Result<()> {
        if self.a_fine.d() != 1 || self.p_coeffs.d() != 1 {
            return domain("projection setups are one-level");
        }
        if self.alpha == 0 || self.alpha >= self.n {
            return domain(format!("projection needs 1 <= alpha < n, got n={}, alpha={}", self.n, self.alpha));
        }
        let eigs = circulant_eigs(&self.a_fine.wrapped_box_vector(&self.size())?, self.n)?;
        if let Some(z) = eigs.iter().find(|z| z.re < -PSD_TOL || z.im.abs() > PSD_TOL) {
            return domain(format!("fine operator is not positive semidefinite (eigenvalue {z})"));
        }
        Ok(())
    }

    fn fold_factor(&self) -> usize {
        gcd(self.n, self.alpha)
    }

    pub fn coarse_size(&self) -> usize {
        self.n / self.fold_factor()
    }

    fn galerkin(&self) -> Result<DenseMatrix> {
        let n = self.size();
        let a = circulant(&self.a_fine.wrapped_box_vector(&n)?, &n)?.matrix;
        let p = circulant(&self.p_coeffs.wrapped_box_vector(&n)?, &n)?.matrix;
        p.adjoint().matmul(&a)?.matmul(&p)
    }

    fn selection(&self) -> Result<DenseMatrix> {
        shift_matrix(&ShiftPattern::one_level(self.n, self.alpha, ShiftVariant::FirstNalpha))
    }
}

/// `max |A_{rc} - A_{(r-c) mod k, 0}|`.
pub fn circulant_defect(m: &DenseMatrix) -> Result<f64> {
    if !m.is_square() {
        return domain("circulant defect needs a square matrix");
    }
    let k = m.rows();
    let mut worst = 0.0f64;
    for r in 0..k {
        for c in 0..k {
            worst = worst.max((m.get(r, c) - m.get((r + k - c) % k, 0)).norm());
        }
    }
    Ok(worst)
}

/// `Z̃ᵀ P* A P Z̃` for `α | n`.
pub fn project(setup: &ProjectionSetup) -> Result<StructuredMatrix> {
    if setup.alpha == 0 || setup.n % setup.alpha != 0 {
        return domain(format!(
            "alpha={} does not divide n={}; use the general projection",
            setup.alpha, setup.n
        ));
    }
    Ok(project_general(setup)?.matrix)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralProjection {
    pub matrix: StructuredMatrix,
    pub circulant_defect: f64,
    /// False when `(n, α) = 1`: the "coarse" operator is as large as the fine one.
    pub is_coarsening: bool,
}

/// `Z̃_{n,α}ᵀ P* A P Z̃_{n,α}` of size `n/(n,α)`; divisibility not required.
pub fn project_general(setup: &ProjectionSetup) -> Result<GeneralProjection> {
    setup.validate()?;
    let z = setup.selection()?;
    let m = z.transpose().matmul(&setup.galerkin()?)?.matmul(&z)?;
    let defect = circulant_defect(&m)?;
    let k = m.rows();
    Ok(GeneralProjection {
        matrix: StructuredMatrix::new(m, MatrixKind::Circulant, MultiIndex::scalar(k as i64), None),
        circulant_defect: defect,
        is_coarsening: k < setup.n,
    })
}

/// Coefficients of `g = |q|^2 f`.
pub fn g_symbol(setup: &ProjectionSetup) -> Result<SymbolSpec> {
    autocorrelate(&setup.p_coeffs).multiply(&setup.a_fine)
}

/// `(1/m) Σ_{l<m} h((x_j + 2πl)/m)` on `x_j = 2πj/k`, `j < k`.
fn fold_on_grid(h: &SymbolSpec, k: usize, m: usize) -> Vec<f64> {
    (0..k)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / k as f64;
            (0..m).map(|l| eval_symbol(h, &[(x + 2.0 * PI * l as f64) / m as f64]).re).sum::<f64>() / m as f64
        })
        .collect()
}

/// Eigenvalues of the coarse operator from the fold of `g` (ascending).
pub fn projected_eigs(setup: &ProjectionSetup) -> Result<Vec<f64>> {
    setup.validate()?;
    let mut vals = fold_on_grid(&g_symbol(setup)?, setup.coarse_size(), setup.fold_factor());
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Singular values of `(P* A P)^{1/2} Z̃`: square roots of the folded `g`.
pub fn projector_singvals(setup: &ProjectionSetup) -> Result<SpectrumResult> {
    let eigs = projected_eigs(setup)?;
    if let Some(v) = eigs.iter().find(|&&v| v < -PSD_TOL) {
        return domain(format!("folded symbol is negative ({v}); no square root"));
    }
    let values = eigs.into_iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(SpectrumResult::from_candidates(values, 0, Provenance::ClosedForm))
}

/// `(P* A P)^{1/2} Z̃` formed explicitly.
pub fn projector_matrix(setup: &ProjectionSetup) -> Result<DenseMatrix> {
    setup.validate()?;
    psd_sqrt(&setup.galerkin()?)?.matmul(&setup.selection()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub alpha: usize,
    pub coarse_size: usize,
    pub min_value: f64,
    pub argmin_x: f64,
    pub retains_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryProbe {
    pub x0: f64,
    pub f_at_x0: f64,
    pub f_at_x0_plus_pi: f64,
    pub classic: FoldSummary,
    pub alternative: FoldSummary,
}

/// Fold values this small count as a zero of the coarse symbol.
pub const FOLD_ZERO_TOL: f64 = 1e-12;

fn fold_summary(f: &SymbolSpec, n: usize, alpha: usize, scale: f64) -> Result<FoldSummary> {
    if alpha == 0 || alpha >= n {
        return domain(format!("fold needs 1 <= alpha < n, got n={n}, alpha={alpha}"));
    }
    let m = gcd(n, alpha);
    let k = n / m;
    let vals = fold_on_grid(f, k, m);
    let (j, &min_value) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    Ok(FoldSummary {
        alpha,
        coarse_size: k,
        min_value,
        argmin_x: 2.0 * PI * j as f64 / k as f64,
        retains_zero: min_value.abs() <= FOLD_ZERO_TOL * scale,
    })
}

/// Compares the coarse-grid fold of a nonnegative symbol for `α = 2` and `alt_alpha`:
/// a symbol vanishing at both `x0` and `x0 + π` keeps a zero under the `α = 2` fold.
pub fn pathological_symmetry_probe(f: &SymbolSpec, x0: f64, n: usize, alt_alpha: usize) -> Result<SymmetryProbe> {
    if f.d() != 1 {
        return domain("the symmetry probe is one-level");
    }
    let grid = n.max(64);
    let mut top = 0.0f64;
    for j in 0..grid {
        let v = eval_symbol(f, &[2.0 * PI * j as f64 / grid as f64]);
        if v.re < -PSD_TOL || v.im.abs() > PSD_TOL {
            return domain(format!("symbol is not real nonnegative (value {v})"));
        }
        top = top.max(v.re);
    }
    let scale = top.max(1.0);
    Ok(SymmetryProbe {
        x0,
        f_at_x0: eval_symbol(f, &[x0]).re,
        f_at_x0_plus_pi: eval_symbol(f, &[x0 + PI]).re,
        classic: fold_summary(f, n, 2, scale)?,
        alternative: fold_summary(f, n, alt_alpha, scale)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultigridReport {
    pub setup: ProjectionSetup,
    pub coarse_size: usize,
    pub is_coarsening: bool,
    pub structure_defect: f64,
    /// Ascending.
    pub projected_eigs: Vec<f64>,
    /// Ascending, from the Hermitian eigensolver on the coarse matrix.
    pub direct_eigs: Vec<f64>,
    pub eig_max_diff: f64,
    /// Descending.
    pub projector_singvals: Vec<f64>,
    pub oracle_singvals: Vec<f64>,
    pub singval_max_diff: f64,
    pub fold_minimum: f64,
}

/// Builds the coarse operator and checks both closed forms against dense computations.
pub fn multigrid_report(setup: &ProjectionSetup) -> Result<MultigridReport> {
    let proj = project_general(setup)?;
    let projected = projected_eigs(setup)?;
    let direct = hermitian_eigenvalues(&proj.matrix.matrix)?;
    let sv = projector_singvals(setup)?;
    let oracle = svd_oracle(&projector_matrix(setup)?)?;
    Ok(MultigridReport {
        setup: setup.clone(),
        coarse_size: proj.matrix.size(),
        is_coarsening: proj.is_coarsening,
        structure_defect: proj.circulant_defect,
        eig_max_diff: multiset_max_diff(&projected, &direct)?,
        fold_minimum: projected.first().copied().unwrap_or(0.0),
        projected_eigs: projected,
        direct_eigs: direct,
        singval_max_diff: multiset_max_diff(&sv.values, &oracle.values)?,
        projector_singvals: sv.values,
        oracle_singvals: oracle.values,
    })
}

/// `1 + cos x`.
pub fn cosine_prolongation() -> SymbolSpec {
    SymbolSpec::from_real_1d(&[(-1, 0.5), (0, 1.0), (1, 0.5)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_symbol() -> SymbolSpec {
        SymbolSpec::from_real_1d(&[(0, 1.0)])
    }

    fn setup(n: usize, alpha: usize, f: SymbolSpec, q: SymbolSpec) -> ProjectionSetup {
        ProjectionSetup::new(n, alpha, f, q)
    }

    fn random_psd(seed: u64) -> SymbolSpec {
        // |h|^2 for a fixed small h is a PSD trigonometric polynomial.
        let h = SymbolSpec::from_real_1d(&[
            (0, 1.0 + (seed % 3) as f64),
            (1, -0.4 * (1 + seed % 2) as f64),
            (2, 0.3),
            (3, 0.1 * seed as f64),
        ]);
        autocorrelate(&h)
    }

    #[test]
    fn identity_projects_to_identity() {
        let s = setup(8, 2, identity_symbol(), identity_symbol());
        let m = project(&s).unwrap();
        assert_eq!(m.matrix, DenseMatrix::identity(4));
    }

    #[test]
    fn laplacian_projection_matches_fold() {
        let s = setup(16, 2, SymbolSpec::laplace1d(), SymbolSpec::from_real_1d(&[(-1, 1.0), (0, 2.0), (1, 1.0)]));
        let m = project(&s).unwrap();
        assert!(circulant_defect(&m.matrix).unwrap() < 1e-10);
        let direct = hermitian_eigenvalues(&m.matrix).unwrap();
        assert!(multiset_max_diff(&projected_eigs(&s).unwrap(), &direct).unwrap() < 1e-10);
    }

    #[test]
    fn identity_prolongation_subsamples() {
        let s = setup(12, 3, random_psd(2), identity_symbol());
        let m = project(&s).unwrap().matrix;
        let n = MultiIndex::scalar(12);
        let a = circulant(&s.a_fine.wrapped_box_vector(&n).unwrap(), &n).unwrap().matrix;
        for r in 0..4 {
            for c in 0..4 {
                assert!((m.get(r, c) - a.get(3 * r, 3 * c)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn projected_eig_examples() {
        let c = SymbolSpec::from_real_1d(&[(0, 3.5)]);
        let vals = projected_eigs(&setup(8, 2, c, identity_symbol())).unwrap();
        assert!(vals.iter().all(|&v| (v - 3.5).abs() < 1e-14));

        // q = 1: eigenvalues (f(x/2) + f(x/2 + π))/2 = 2 for the Laplacian.
        let vals = projected_eigs(&setup(16, 2, SymbolSpec::laplace1d(), identity_symbol())).unwrap();
        let s = setup(16, 2, SymbolSpec::laplace1d(), identity_symbol());
        let direct = hermitian_eigenvalues(&project(&s).unwrap().matrix).unwrap();
        assert!(multiset_max_diff(&vals, &direct).unwrap() < 1e-10);
    }

    #[test]
    fn dual_path_sweep() {
        for n in [8usize, 12, 16, 24] {
            for alpha in [2usize, 3, 4] {
                if n % alpha != 0 {
                    continue;
                }
                for seed in 0..3 {
                    let s = setup(n, alpha, random_psd(seed), cosine_prolongation());
                    let m = project(&s).unwrap();
                    assert!(circulant_defect(&m.matrix).unwrap() < 1e-10);
                    let direct = hermitian_eigenvalues(&m.matrix).unwrap();
                    let d = multiset_max_diff(&projected_eigs(&s).unwrap(), &direct).unwrap();
                    assert!(d < 1e-10, "n={n} alpha={alpha} seed={seed}: {d}");
                }
            }
        }
    }

    #[test]
    fn projector_singval_examples() {
        let zero = SymbolSpec::from_real_1d(&[(0, 0.0)]);
        let sv = projector_singvals(&setup(8, 2, zero, identity_symbol())).unwrap();
        assert!(sv.values.iter().all(|&v| v == 0.0));

        for (n, q) in [(8, identity_symbol()), (16, cosine_prolongation())] {
            let s = setup(n, 2, SymbolSpec::laplace1d(), q);
            let closed = projector_singvals(&s).unwrap();
            let oracle = svd_oracle(&projector_matrix(&s).unwrap()).unwrap();
            assert!(multiset_max_diff(&closed.values, &oracle.values).unwrap() < 1e-8);
        }
    }

    #[test]
    fn projector_singvals_scale_symbol_form() {
        for (n, alpha) in [(12usize, 2usize), (12, 3), (16, 4), (18, 3)] {
            let s = setup(n, alpha, random_psd(1), cosine_prolongation());
            let g = g_symbol(&s).unwrap();
            let m = gcd(n, alpha);
            let k = n / m;
            // Unnormalized fold sqrt(Σ_l g((x_j + 2πl)/m)).
            let symbol_form: Vec<f64> = (0..k)
                .map(|j| {
                    let x = 2.0 * PI * j as f64 / k as f64;
                    (0..m)
                        .map(|l| eval_symbol(&g, &[(x + 2.0 * PI * l as f64) / m as f64]).re)
                        .sum::<f64>()
                        .sqrt()
                        / (m as f64).sqrt()
                })
                .collect();
            let sv = projector_singvals(&s).unwrap();
            assert!(multiset_max_diff(&sv.values, &symbol_form).unwrap() < 1e-8);
        }
    }

    #[test]
    fn rejects_indefinite_and_bad_shapes() {
        let bad = SymbolSpec::from_real_1d(&[(0, -1.0)]);
        assert!(project(&setup(8, 2, bad, identity_symbol())).is_err());
        assert!(project(&setup(9, 2, SymbolSpec::laplace1d(), identity_symbol())).is_err());
        assert!(project_general(&setup(8, 8, SymbolSpec::laplace1d(), identity_symbol())).is_err());
    }

    #[test]
    fn general_projection_examples() {
        let s = setup(16, 2, random_psd(0), cosine_prolongation());
        assert_eq!(project_general(&s).unwrap().matrix, project(&s).unwrap());

        let s = setup(12, 3, random_psd(1), cosine_prolongation());
        let g = project_general(&s).unwrap();
        assert_eq!(g.matrix.size(), 4);
        assert!(g.is_coarsening);

        let s = setup(9, 2, random_psd(2), cosine_prolongation());
        let g = project_general(&s).unwrap();
        assert_eq!(g.matrix.size(), 9);
        assert!(!g.is_coarsening);
        let direct = hermitian_eigenvalues(&g.matrix.matrix).unwrap();
        assert!(multiset_max_diff(&projected_eigs(&s).unwrap(), &direct).unwrap() < 1e-10);
    }

    #[test]
    fn symmetry_probe_examples() {
        let patho = SymbolSpec::from_real_1d(&[(-2, -1.0), (0, 2.0), (2, -1.0)]);
        let p = pathological_symmetry_probe(&patho, 0.0, 24, 3).unwrap();
        assert!(p.f_at_x0.abs() < 1e-15 && p.f_at_x0_plus_pi.abs() < 1e-14);
        assert!(p.classic.retains_zero);
        assert_eq!(p.classic.argmin_x, 0.0);
        assert!(!p.alternative.retains_zero);
        assert!(p.alternative.min_value > 0.5);

        let p = pathological_symmetry_probe(&SymbolSpec::laplace1d(), 0.0, 24, 3).unwrap();
        assert!(!p.classic.retains_zero);
        assert!(p.classic.min_value > 1.0);

        assert!(pathological_symmetry_probe(&SymbolSpec::from_real_1d(&[(0, -1.0)]), 0.0, 24, 3).is_err());
    }

    #[test]
    fn report_fields_agree() {
        let r = multigrid_report(&setup(16, 2, SymbolSpec::laplace1d(), cosine_prolongation())).unwrap();
        assert_eq!(r.coarse_size, 8);
        assert!(r.structure_defect < 1e-10);
        assert!(r.eig_max_diff < 1e-10);
        assert!(r.singval_max_diff < 1e-8);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("setup").and_then(|s| s.get("a_fine")).is_some());
    }
}
