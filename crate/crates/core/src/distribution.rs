//! Singular value distribution experiments.
//!
//! `Σ_σ(F, A) = (1/N) Σ_j F(σ_j(A))` is compared against the limit predicted by
//! the distribution symbol θ: `(1/α̂)(2π)^{-d} ∫ F(√ĥ) + (1 - 1/α̂) F(0)`, where
//! `ĥ` is the folded square of the generating function.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::index::{box_indices, MultiIndex};
use crate::spectra::{alpha_circulant_spectrum, svd_oracle, zero_alpha_reduction, ReductionKind, SpectrumResult};
use crate::structured::{alpha_circulant, alpha_toeplitz, gcd};
use crate::symbols::{eval_symbol, SymbolSpec, ThetaSymbol};

/// Largest `n̂` for which experiments build the matrix and call the oracle.
pub const ORACLE_CAP: usize = 2048;

const QUAD_START_1D: u32 = 12;
const QUAD_MAX_1D: u32 = 16;
const QUAD_MAX_TOTAL: u32 = 22;
const QUAD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `max(0, 1 - |x - center| / half_width)`.
    Hat { center: f64, half_width: f64 },
    /// `max(0, exp(-((x - center)/scale)^2) - exp(-(radius/scale)^2))`, supported on
    /// `|x - center| <= radius`.
    GaussianBump { center: f64, scale: f64, radius: f64 },
    /// `min(x, cap)`.
    Clamp { cap: f64 },
}

impl TestFunction {
    pub fn hat(center: f64, half_width: f64) -> Result<Self> {
        TestFunction::Hat { center, half_width }.validated()
    }

    pub fn gaussian_bump(center: f64, scale: f64, radius: f64) -> Result<Self> {
        TestFunction::GaussianBump { center, scale, radius }.validated()
    }

    pub fn clamp(cap: f64) -> Result<Self> {
        TestFunction::Clamp { cap }.validated()
    }

    fn validated(self) -> Result<Self> {
        let params: Vec<f64> = match self {
            TestFunction::Hat { center, half_width } => vec![center, half_width],
            TestFunction::GaussianBump { center, scale, radius } => vec![center, scale, radius],
            TestFunction::Clamp { cap } => vec![cap],
        };
        if params.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return domain(format!("test function {self} needs finite nonnegative parameters"));
        }
        match self {
            TestFunction::Hat { half_width: 0.0, .. } => domain("hat half-width must be positive"),
            TestFunction::GaussianBump { scale: 0.0, .. } => domain("bump scale must be positive"),
            _ => Ok(self),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Hat { center, half_width } => (1.0 - (x - center).abs() / half_width).max(0.0),
            TestFunction::GaussianBump { center, scale, radius } => {
                let u = (x - center) / scale;
                let floor = (-(radius / scale).powi(2)).exp();
                ((-u * u).exp() - floor).max(0.0)
            }
            TestFunction::Clamp { cap } => x.min(cap),
        }
    }

    /// `sup |F|` over `[0, ∞)`.
    pub fn sup_abs(&self) -> f64 {
        match *self {
            TestFunction::Hat { .. } => 1.0,
            TestFunction::GaussianBump { scale, radius, .. } => 1.0 - (-(radius / scale).powi(2)).exp(),
            TestFunction::Clamp { cap } => cap,
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Hat { center, half_width } => write!(f, "hat:{center}:{half_width}"),
            TestFunction::GaussianBump { center, scale, radius } => write!(f, "bump:{center}:{scale}:{radius}"),
            TestFunction::Clamp { cap } => write!(f, "clamp:{cap}"),
        }
    }
}

/// Parses `hat:C:W`, `bump:C:S:R` or `clamp:C` (the [`Display`](fmt::Display) form).
impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or("");
        let nums = parts
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("test function `{s}`: {e}")))?;
        match (name, nums.as_slice()) {
            ("hat", &[c, w]) => TestFunction::hat(c, w),
            ("bump", &[c, sc, r]) => TestFunction::gaussian_bump(c, sc, r),
            ("clamp", &[c]) => TestFunction::clamp(c),
            _ => Err(Error::Parse(format!(
                "test function `{s}`: expected hat:C:W, bump:C:S:R or clamp:C"
            ))),
        }
    }
}

/// `(1/min_dim) Σ_j F(σ_j)`.
pub fn sigma_functional(f: &TestFunction, spec: &SpectrumResult, min_dim: usize) -> Result<f64> {
    if spec.len() != min_dim || min_dim == 0 {
        return domain(format!("spectrum has {} values, expected {min_dim}", spec.len()));
    }
    Ok(spec.values.iter().map(|&s| f.eval(s)).sum::<f64>() / min_dim as f64)
}

/// `|Σ_σ(F, A) - Σ_σ(F, B)|`.
pub fn equal_distribution_gap(a: &SpectrumResult, b: &SpectrumResult, f: &TestFunction) -> Result<f64> {
    if a.len() != b.len() {
        return domain(format!("spectra have {} and {} values", a.len(), b.len()));
    }
    Ok((sigma_functional(f, a, a.len())? - sigma_functional(f, b, b.len())?).abs())
}

/// Two-sided bound on `Σ_σ(F, A)` when all but `n̂ / n0_hat` singular values vanish:
/// `(1 - 1/n0_hat) F(0) ∓ sup|F| / n0_hat`.
pub fn degenerate_bounds(f: &TestFunction, n0_hat: usize) -> (f64, f64) {
    let m = n0_hat as f64;
    let centre = (1.0 - 1.0 / m) * f.eval(0.0);
    let slack = f.sup_abs() / m;
    (centre - slack, centre + slack)
}

/// Mean of `g` over the uniform periodic grid with `per_level` points per level.
fn grid_mean(d: usize, per_level: usize, g: impl Fn(&[f64]) -> f64) -> f64 {
    let h = 2.0 * PI / per_level as f64;
    let sizes = vec![per_level; d];
    let mut x = vec![0.0; d];
    let sum: f64 = box_indices(&sizes)
        .map(|m| {
            for (xk, &mk) in x.iter_mut().zip(&m) {
                *xk = -PI + h * mk as f64;
            }
            g(&x)
        })
        .sum();
    sum / per_level.pow(d as u32) as f64
}

/// `(2π)^{-d} ∫ g`, doubling the grid until successive values agree to 1e-9.
/// One level runs 2^12 .. 2^16 points; in `d` levels the total is capped at 2^22.
fn periodic_mean(d: usize, label: &dyn fmt::Display, g: impl Fn(&[f64]) -> f64) -> Result<f64> {
    if d == 0 {
        return domain("symbol has no levels");
    }
    let dd = d as u32;
    let (start, stop) = if d == 1 {
        (QUAD_START_1D, QUAD_MAX_1D)
    } else {
        ((QUAD_START_1D / dd).max(3), (QUAD_MAX_TOTAL / dd).max(4))
    };
    let mut prev = grid_mean(d, 1 << start, &g);
    for e in start + 1..=stop {
        let next = grid_mean(d, 1 << e, &g);
        if (next - prev).abs() < QUAD_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "quadrature for {label} did not settle to {QUAD_TOL:e} with 2^{stop} points per level \
         (kinks in the integrand slow the uniform rule; a bump test function converges faster)"
    )))
}

/// The limit `(1/α̂)(2π)^{-d} ∫ F(√ĥ(x)) dx + (1 - 1/α̂) F(0)`.
pub fn analytic_limit(f: &TestFunction, th: &ThetaSymbol) -> Result<f64> {
    let weight = 1.0 / th.alpha_hat();
    let mean = periodic_mean(th.base.d(), f, |x| f.eval(th.magnitude(x)))?;
    Ok(weight * mean + (1.0 - weight) * f.eval(0.0))
}

/// `(2π)^{-d} ∫ F(|f|)`: the `α = e` limit computed without folding.
pub fn plain_symbol_limit(f: &TestFunction, s: &SymbolSpec) -> Result<f64> {
    periodic_mean(s.d(), f, |x| f.eval(eval_symbol(s, x).norm()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    AlphaToeplitz,
    AlphaCirculant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeRecord {
    pub n: MultiIndex,
    pub n_hat: usize,
    /// `Σ_σ(F, A_n)`, one per test function.
    pub sigma: Vec<f64>,
    /// `|Σ_σ - limit|`, one per test function.
    pub errors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub family: Family,
    pub alpha: MultiIndex,
    pub mode: Mode,
    pub functions: Vec<TestFunction>,
    pub limits: Vec<f64>,
    /// Sorted by `n̂` ascending.
    pub records: Vec<SizeRecord>,
    /// Per function: error at the largest size below the error at the smallest
    /// (or already at round-off).
    pub decreasing: Vec<bool>,
}

impl DistributionReport {
    pub fn all_decreasing(&self) -> bool {
        self.decreasing.iter().all(|&b| b)
    }

    pub fn final_errors(&self) -> Vec<f64> {
        self.records.last().map(|r| r.errors.clone()).unwrap_or_default()
    }

    /// Long-format CSV: `size,function,sigma_functional,limit,error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,function,sigma_functional,limit,error\n");
        for r in &self.records {
            let size = size_label(&r.n);
            for (i, f) in self.functions.iter().enumerate() {
                writeln!(out, "{size},{f},{:?},{:?},{:?}", r.sigma[i], self.limits[i], r.errors[i]).unwrap();
            }
        }
        out
    }
}

/// `16` or `2x3x4`.
pub fn size_label(n: &MultiIndex) -> String {
    n.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("x")
}

fn family_limits(s: &SymbolSpec, alpha: &MultiIndex, family: Family, functions: &[TestFunction]) -> Result<Vec<f64>> {
    if !alpha.is_positive() {
        // Zero shift components collapse the distribution onto 0.
        return Ok(functions.iter().map(|f| f.eval(0.0)).collect());
    }
    if family == Family::AlphaCirculant && !alpha.iter().all(|&a| a == 1) {
        return config(format!(
            "α-circulant family with shift {alpha} has no joint distribution across sizes; use shift all ones or a zero component"
        ));
    }
    let th = ThetaSymbol::new(s, alpha)?;
    functions.iter().map(|f| analytic_limit(f, &th)).collect()
}

fn family_spectrum(
    s: &SymbolSpec,
    n: &MultiIndex,
    alpha: &MultiIndex,
    family: Family,
    mode: Mode,
) -> Result<SpectrumResult> {
    let n_hat = n.product() as usize;
    match (mode, family) {
        (Mode::Oracle, _) if n_hat > ORACLE_CAP => {
            config(format!("oracle mode is capped at n̂ <= {ORACLE_CAP}, got {n_hat} for sizes {n}"))
        }
        (Mode::Oracle, Family::AlphaToeplitz) => svd_oracle(&alpha_toeplitz(s, n, alpha)?.matrix),
        (Mode::Oracle, Family::AlphaCirculant) => {
            svd_oracle(&alpha_circulant(&s.wrapped_box_vector(n)?, n, alpha)?.matrix)
        }
        (Mode::ClosedForm, Family::AlphaCirculant) => alpha_circulant_spectrum(&s.wrapped_box_vector(n)?, n, alpha),
        (Mode::ClosedForm, Family::AlphaToeplitz) => {
            if alpha.is_positive() {
                return config("α-Toeplitz matrices with a positive shift have no closed form; use oracle mode");
            }
            zero_alpha_reduction(s, n, alpha, ReductionKind::Toeplitz)
        }
    }
}

/// Runs the family over `sizes`, recording `Σ_σ(F, A_n)` and its distance to the limit.
pub fn distribution_experiment(
    s: &SymbolSpec,
    alpha: &MultiIndex,
    sizes: &[MultiIndex],
    functions: &[TestFunction],
    mode: Mode,
    family: Family,
) -> Result<DistributionReport> {
    if sizes.is_empty() || functions.is_empty() {
        return config("experiment needs at least one size and one test function");
    }
    for n in sizes {
        n.sizes()?;
        if n.len() != s.d() || alpha.len() != s.d() {
            return domain(format!("sizes {n}, shift {alpha} and the symbol must have {} levels", s.d()));
        }
    }
    alpha.shifts()?;
    if sizes.windows(2).any(|w| w[0].product() >= w[1].product()) {
        return config("sizes must be strictly increasing in n̂");
    }
    let limits = family_limits(s, alpha, family, functions)?;

    let spectra: Vec<SpectrumResult> = sizes
        .par_iter()
        .map(|n| family_spectrum(s, n, alpha, family, mode))
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(sizes.len());
    for (n, spec) in sizes.iter().zip(&spectra) {
        let n_hat = n.product() as usize;
        let sigma = functions
            .iter()
            .map(|f| sigma_functional(f, spec, n_hat))
            .collect::<Result<Vec<_>>>()?;
        let errors = sigma.iter().zip(&limits).map(|(v, l)| (v - l).abs()).collect();
        records.push(SizeRecord { n: n.clone(), n_hat, sigma, errors });
    }
    let first = &records[0].errors;
    let last = &records[records.len() - 1].errors;
    let decreasing = first.iter().zip(last).map(|(a, b)| b < a || *b <= 1e-12).collect();
    Ok(DistributionReport {
        family,
        alpha: alpha.clone(),
        mode,
        functions: functions.to_vec(),
        limits,
        records,
        decreasing,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcdProbeEntry {
    pub n: usize,
    pub g: usize,
    pub coprime: bool,
    pub structural_zeros: usize,
    /// `n_α / n`, the share of singular values not forced to zero.
    pub nonzero_fraction: f64,
    pub sigma: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcdProbeReport {
    pub alpha: usize,
    pub functions: Vec<TestFunction>,
    pub entries: Vec<GcdProbeEntry>,
}

impl GcdProbeReport {
    pub fn coprime(&self) -> impl Iterator<Item = &GcdProbeEntry> {
        self.entries.iter().filter(|e| e.coprime)
    }

    pub fn shared(&self) -> impl Iterator<Item = &GcdProbeEntry> {
        self.entries.iter().filter(|e| !e.coprime)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,gcd,class,structural_zeros,nonzero_fraction,function,sigma_functional\n");
        for e in &self.entries {
            let class = if e.coprime { "coprime" } else { "shared" };
            for (f, v) in self.functions.iter().zip(&e.sigma) {
                writeln!(out, "{},{},{class},{},{},{f},{v}", e.n, e.g, e.structural_zeros, e.nonzero_fraction)
                    .unwrap();
            }
        }
        out
    }
}

/// `Σ_σ` of the one-level α-circulants of `s` along `sizes`, split by whether
/// `(n, α) = 1`.
pub fn gcd_regime_probe(
    s: &SymbolSpec,
    alpha: usize,
    sizes: &[usize],
    functions: &[TestFunction],
) -> Result<GcdProbeReport> {
    if s.d() != 1 {
        return domain("the gcd probe is one-level");
    }
    let entries = sizes
        .iter()
        .map(|&n| {
            if n == 0 {
                return domain("sizes must be positive");
            }
            let nn = MultiIndex::scalar(n as i64);
            let spec = alpha_circulant_spectrum(&s.wrapped_box_vector(&nn)?, &nn, &MultiIndex::scalar(alpha as i64))?;
            let g = gcd(n, alpha % n);
            let sigma = functions.iter().map(|f| sigma_functional(f, &spec, n)).collect::<Result<_>>()?;
            Ok(GcdProbeEntry {
                n,
                g,
                coprime: g == 1,
                structural_zeros: spec.structural_zero_count,
                nonzero_fraction: (n - spec.structural_zero_count) as f64 / n as f64,
                sigma,
            })
        })
        .collect::<Result<_>>()?;
    Ok(GcdProbeReport { alpha, functions: functions.to_vec(), entries })
}
