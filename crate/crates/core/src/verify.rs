//! Residual sweeps over the matrix identities and the closed-form spectra.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::C64;
use crate::error::{config, Result};
use crate::index::MultiIndex;
use crate::rng::CaseRng;
use crate::spectra::{
    alpha_circulant_singvals, alpha_circulant_singvals_symbol, alpha_circulant_spectrum, multiset_max_diff, svd_oracle,
};
use crate::structured::{
    alpha_circulant, alpha_toeplitz, circulant, gcd, gcd_data, permute_levels, shift_matrix, tail_embedding,
    toeplitz_tail_split, verify_fourier_shift_identity, ShiftPattern, ShiftVariant,
};
use crate::symbols::SymbolSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    CirculantFactorization,
    BlockRepetition,
    ShiftFactorization,
    FourierShift,
    ToeplitzSplit,
    TailEmbedding,
    TailFlip,
    ClosedFormSingvals,
    SymbolFormSingvals,
    MultilevelSingvals,
    LevelPermutation,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::CirculantFactorization => "circulant_factorization",
            Check::BlockRepetition => "block_repetition",
            Check::ShiftFactorization => "shift_factorization",
            Check::FourierShift => "fourier_shift",
            Check::ToeplitzSplit => "toeplitz_split",
            Check::TailEmbedding => "tail_embedding",
            Check::TailFlip => "tail_flip",
            Check::ClosedFormSingvals => "closed_form_singvals",
            Check::SymbolFormSingvals => "symbol_form_singvals",
            Check::MultilevelSingvals => "multilevel_singvals",
            Check::LevelPermutation => "level_permutation",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Largest one-level size in the spectral sweep.
    pub max_n: usize,
    /// Random coefficient vectors per `(n, α)`.
    pub seeds: usize,
    /// Spectral tolerance, scaled by `max(1, ‖a‖₁)`.
    pub tolerance: f64,
    pub identity_tolerance: f64,
    /// Identity sweep bounds.
    pub identity_max_n: usize,
    pub identity_max_alpha: usize,
    pub seed: u64,
    /// Negative control: perturbs the closed-form values before comparison.
    pub corrupt: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_n: 24,
            seeds: 5,
            tolerance: 1e-10,
            identity_tolerance: 1e-12,
            identity_max_n: 20,
            identity_max_alpha: 5,
            seed: 0,
            corrupt: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub check: Check,
    /// Level sizes, `x`-separated for multilevel cases.
    pub n: String,
    pub alpha: String,
    pub seed: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub records: Vec<CaseRecord>,
    pub failures: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn first_failure(&self) -> Option<&CaseRecord> {
        self.records.iter().find(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,n,alpha,seed,residual,tolerance,pass\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{},{:e},{:e},{}", r.check, r.n, r.alpha, r.seed, r.residual, r.tolerance, r.pass);
        }
        out
    }
}

#[derive(Clone, Debug)]
enum Case {
    Identities { n: usize, alpha: usize },
    Spectral { n: usize, alpha: usize, seed: usize },
    Multilevel { n: Vec<usize>, alpha: Vec<usize> },
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("x")
}

fn multi(v: &[usize]) -> MultiIndex {
    MultiIndex::from_sizes(v)
}

fn l1(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm()).sum()
}

/// Coefficients on `-(αn + 2) ..= n` so that every entry of the split and tail blocks is generic.
fn random_symbol(rng: &mut CaseRng, n: usize, alpha: usize) -> SymbolSpec {
    let lo = -((alpha * n + 2) as i64);
    let mut s = SymbolSpec::new(1);
    for j in lo..=n as i64 {
        s.add(MultiIndex::scalar(j), rng.complex()).expect("one level");
    }
    s
}

fn cases(cfg: &VerifyConfig) -> Vec<Case> {
    let mut out = Vec::new();
    for n in 2..=cfg.identity_max_n {
        for alpha in 1..=cfg.identity_max_alpha {
            out.push(Case::Identities { n, alpha });
        }
    }
    for n in 2..=cfg.max_n {
        for alpha in 0..=n + 3 {
            for seed in 0..cfg.seeds {
                out.push(Case::Spectral { n, alpha, seed });
            }
        }
    }
    for sizes in [vec![2usize, 3], vec![3, 4], vec![2, 3, 4]] {
        let mut alpha = vec![0usize; sizes.len()];
        loop {
            out.push(Case::Multilevel { n: sizes.clone(), alpha: alpha.clone() });
            // Odometer over 0..=n_k on each level.
            let mut k = alpha.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if alpha[k] < sizes[k] {
                    alpha[k] += 1;
                    break;
                }
                alpha[k] = 0;
            }
            if alpha.iter().all(|&a| a == 0) {
                break;
            }
        }
    }
    out
}

fn record(check: Check, n: String, alpha: String, seed: usize, residual: f64, tolerance: f64) -> CaseRecord {
    CaseRecord { check, n, alpha, seed, residual, tolerance, pass: residual <= tolerance }
}

fn run_identities(cfg: &VerifyConfig, n: usize, alpha: usize) -> Result<Vec<CaseRecord>> {
    let tol = cfg.identity_tolerance;
    let (ns, als) = (n.to_string(), alpha.to_string());
    let rec = |check, residual| record(check, ns.clone(), als.clone(), 0, residual, tol);
    let mut rng = CaseRng::for_case(cfg.seed, n, alpha, usize::MAX);
    let (nn, aa) = (MultiIndex::scalar(n as i64), MultiIndex::scalar(alpha as i64));
    let mut out = Vec::new();

    let a = rng.complex_vec(n);
    let z = shift_matrix(&ShiftPattern::one_level(n, alpha, ShiftVariant::Full))?;
    let lhs = alpha_circulant(&a, &nn, &aa)?.matrix;
    out.push(rec(Check::CirculantFactorization, lhs.max_abs_diff(&circulant(&a, &nn)?.matrix.matmul(&z)?)?));

    let zt = shift_matrix(&ShiftPattern::one_level(n, alpha, ShiftVariant::FirstNalpha))?;
    let mut rep = zt.clone();
    for _ in 1..gcd(n, alpha % n) {
        rep = rep.hcat(&zt)?;
    }
    out.push(rec(Check::BlockRepetition, z.max_abs_diff(&rep)?));

    if alpha < n {
        let r = verify_fourier_shift_identity(n, alpha)?;
        out.push(rec(Check::ShiftFactorization, r.factorization));
        out.push(rec(Check::FourierShift, r.fourier));
    }

    let s = random_symbol(&mut rng, n, alpha);
    let (head, tail) = toeplitz_tail_split(&s, n, alpha)?;
    let joined = if tail.cols() == 0 { head } else { head.hcat(&tail)? };
    out.push(rec(Check::ToeplitzSplit, joined.max_abs_diff(&alpha_toeplitz(&s, &nn, &aa)?.matrix)?));

    let t = tail_embedding(&s, n, alpha, gcd_data(n, alpha)?.d_tail)?;
    out.push(rec(Check::TailEmbedding, t.embedding));
    out.push(rec(Check::TailFlip, t.flip));
    Ok(out)
}

fn run_spectral(cfg: &VerifyConfig, n: usize, alpha: usize, seed: usize) -> Result<Vec<CaseRecord>> {
    let a = CaseRng::for_case(cfg.seed, n, alpha, seed).complex_vec(n);
    let tol = cfg.tolerance * l1(&a).max(1.0);
    let (nn, aa) = (MultiIndex::scalar(n as i64), MultiIndex::scalar(alpha as i64));
    let oracle = svd_oracle(&alpha_circulant(&a, &nn, &aa)?.matrix)?;
    let closed = alpha_circulant_singvals(&a, n, alpha)?;
    let mut corrupted = closed.values.clone();
    if cfg.corrupt {
        corrupted[0] += 1e-3;
    }
    let symbol = alpha_circulant_singvals_symbol(&a, n, alpha)?;
    let (ns, als) = (n.to_string(), alpha.to_string());
    Ok(vec![
        record(Check::ClosedFormSingvals, ns.clone(), als.clone(), seed, multiset_max_diff(&corrupted, &oracle.values)?, tol),
        record(Check::SymbolFormSingvals, ns, als, seed, multiset_max_diff(&closed.values, &symbol.values)?, tol),
    ])
}

fn run_multilevel(cfg: &VerifyConfig, sizes: &[usize], alpha: &[usize]) -> Result<Vec<CaseRecord>> {
    let (n, al) = (multi(sizes), multi(alpha));
    let total: usize = sizes.iter().product();
    let key = alpha.iter().fold(0usize, |h, &x| h * 31 + x);
    let a = CaseRng::for_case(cfg.seed, total, key, sizes.len()).complex_vec(total);
    let tol = cfg.tolerance * l1(&a).max(1.0);
    let m = alpha_circulant(&a, &n, &al)?;
    let oracle = svd_oracle(&m.matrix)?;
    let closed = alpha_circulant_spectrum(&a, &n, &al)?;
    let perm: Vec<usize> = (0..sizes.len()).rev().collect();
    let permuted = svd_oracle(&permute_levels(&m, &perm)?.matrix)?;
    let (ns, als) = (join(sizes), join(alpha));
    Ok(vec![
        record(Check::MultilevelSingvals, ns.clone(), als.clone(), 0, multiset_max_diff(&closed.values, &oracle.values)?, tol),
        record(Check::LevelPermutation, ns, als, 0, multiset_max_diff(&permuted.values, &oracle.values)?, tol),
    ])
}

/// Runs every case in parallel; records come back in case order.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.max_n < 2 || cfg.identity_max_n < 2 || cfg.identity_max_alpha < 1 {
        return config("sweep bounds must allow n >= 2 and alpha >= 1");
    }
    if !(cfg.tolerance > 0.0 && cfg.identity_tolerance > 0.0) {
        return config("tolerances must be positive");
    }
    let per_case: Vec<Vec<CaseRecord>> = cases(cfg)
        .par_iter()
        .map(|c| match c {
            Case::Identities { n, alpha } => run_identities(cfg, *n, *alpha),
            Case::Spectral { n, alpha, seed } => run_spectral(cfg, *n, *alpha, *seed),
            Case::Multilevel { n, alpha } => run_multilevel(cfg, n, alpha),
        })
        .collect::<Result<_>>()?;
    let records: Vec<CaseRecord> = per_case.into_iter().flatten().collect();
    let failures = records.iter().filter(|r| !r.pass).count();
    Ok(VerifyReport { records, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig { max_n: 9, seeds: 2, identity_max_n: 9, identity_max_alpha: 4, ..VerifyConfig::default() }
    }

    #[test]
    fn small_sweep_passes_and_is_deterministic() {
        let r = run_verification(&small()).unwrap();
        assert!(r.passed(), "{:?}", r.first_failure());
        assert_eq!(r.to_csv(), run_verification(&small()).unwrap().to_csv());
        for check in [Check::TailEmbedding, Check::TailFlip, Check::ToeplitzSplit, Check::CirculantFactorization] {
            assert!(r.records.iter().filter(|x| x.check == check).all(|x| x.residual == 0.0), "{check}");
        }
    }

    #[test]
    fn corruption_fails_closed_form_check() {
        let r = run_verification(&VerifyConfig { corrupt: true, ..small() }).unwrap();
        let f = r.first_failure().unwrap();
        assert_eq!(f.check, Check::ClosedFormSingvals);
        assert!(r.records.iter().filter(|x| !x.pass).all(|x| x.check == Check::ClosedFormSingvals));
    }

    #[test]
    fn multilevel_cases_cover_all_shift_patterns() {
        let n = cases(&small()).iter().filter(|c| matches!(c, Case::Multilevel { .. })).count();
        assert_eq!(n, 3 * 4 + 4 * 5 + 3 * 4 * 5);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(run_verification(&VerifyConfig { max_n: 1, ..small() }).is_err());
        assert!(run_verification(&VerifyConfig { tolerance: 0.0, ..small() }).is_err());
    }
}
