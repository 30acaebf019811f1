//! Generating functions represented by their Fourier coefficients.
//!
//! A [`SymbolSpec`] is a finitely supported coefficient map `j -> a_j` over
//! `d`-level integer indices, standing for the trigonometric polynomial
//! `f(x) = sum_j a_j exp(i <j, x>)`. Matrices read their entries from it, and
//! the folded square `(1/α̂) sum_l |f|^2((x + 2πl)/α)` that governs the
//! singular value distribution of α-Toeplitz sequences is computed exactly
//! in coefficient space: its coefficient at `j` is the autocorrelation of
//! `a` sampled at `α∘j`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dense::{C64, ZERO};
use crate::error::{config, domain, Error, Result};
use crate::index::{box_indices, rank_sizes, MultiIndex};

/// Round-off allowed below zero when taking the square root of the folded square.
pub const FOLD_CLIP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SymbolRepr", try_from = "SymbolRepr")]
pub struct SymbolSpec {
    d: usize,
    coeffs: BTreeMap<MultiIndex, C64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CoeffEntry {
    index: MultiIndex,
    re: f64,
    im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SymbolRepr {
    d: usize,
    coeffs: Vec<CoeffEntry>,
}

impl From<SymbolSpec> for SymbolRepr {
    fn from(s: SymbolSpec) -> Self {
        let coeffs = s.coeffs.into_iter().map(|(index, v)| CoeffEntry { index, re: v.re, im: v.im }).collect();
        SymbolRepr { d: s.d, coeffs }
    }
}

impl TryFrom<SymbolRepr> for SymbolSpec {
    type Error = Error;

    fn try_from(r: SymbolRepr) -> Result<Self> {
        let mut s = SymbolSpec::new(r.d);
        for e in r.coeffs {
            s.add(e.index, C64::new(e.re, e.im))?;
        }
        Ok(s)
    }
}

impl SymbolSpec {
    pub fn new(d: usize) -> Self {
        SymbolSpec { d, coeffs: BTreeMap::new() }
    }

    pub fn from_pairs<I>(d: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, C64)>,
    {
        let mut s = SymbolSpec::new(d);
        for (idx, v) in pairs {
            s.add(MultiIndex::new(idx), v)?;
        }
        Ok(s)
    }

    /// One-level symbol from `(index, real coefficient)` pairs.
    pub fn from_real_1d(pairs: &[(i64, f64)]) -> Self {
        let mut s = SymbolSpec::new(1);
        for &(j, v) in pairs {
            s.add(MultiIndex::scalar(j), C64::new(v, 0.0)).expect("one-level index");
        }
        s
    }

    pub fn constant(d: usize, c: C64) -> Self {
        let mut s = SymbolSpec::new(d);
        s.add(MultiIndex::zeros(d), c).expect("matching length");
        s
    }

    /// `2 - 2cos x`, the one-dimensional discrete Laplacian.
    pub fn laplace1d() -> Self {
        Self::from_real_1d(&[(-1, -1.0), (0, 2.0), (1, -1.0)])
    }

    /// `1 + exp(ix)`.
    pub fn shift1() -> Self {
        Self::from_real_1d(&[(0, 1.0), (1, 1.0)])
    }

    /// Coefficients `a_j` for `j` in the box `0 <= j < n`, given in lexicographic order.
    pub fn from_box_vector(a: &[C64], n: &MultiIndex) -> Result<Self> {
        let sizes = n.sizes()?;
        let total: usize = sizes.iter().product();
        if a.len() != total {
            return domain(format!("expected {total} coefficients for sizes {n}, got {}", a.len()));
        }
        let mut s = SymbolSpec::new(sizes.len());
        for (idx, &v) in box_indices(&sizes).zip(a) {
            s.add(MultiIndex::from_sizes(&idx), v)?;
        }
        Ok(s)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Adds `v` to the coefficient at `idx`; exact zeros are dropped.
    pub fn add(&mut self, idx: MultiIndex, v: C64) -> Result<()> {
        if idx.len() != self.d {
            return domain(format!("index {idx} does not have {} levels", self.d));
        }
        let entry = self.coeffs.entry(idx.clone()).or_insert(ZERO);
        *entry += v;
        if *entry == ZERO {
            self.coeffs.remove(&idx);
        }
        Ok(())
    }

    /// Coefficient at `idx`; indices outside the support read as zero.
    pub fn get(&self, idx: &[i64]) -> C64 {
        self.coeffs.get(&MultiIndex::new(idx.to_vec())).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> + '_ {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|z| z.norm()).sum()
    }

    /// Coefficients on the box `0 <= j < n`, lexicographic. Entries outside are ignored.
    pub fn box_vector(&self, n: &MultiIndex) -> Result<Vec<C64>> {
        let sizes = self.check_sizes(n)?;
        Ok(box_indices(&sizes)
            .map(|idx| self.get(&idx.iter().map(|&v| v as i64).collect::<Vec<_>>()))
            .collect())
    }

    /// Coefficients aliased onto the box `0 <= j < n`: `b_k = sum_{j ≡ k mod n} a_j`.
    ///
    /// The circulant with first column `b` has eigenvalues `f(2πk/n)`.
    pub fn wrapped_box_vector(&self, n: &MultiIndex) -> Result<Vec<C64>> {
        let sizes = self.check_sizes(n)?;
        let mut out = vec![ZERO; sizes.iter().product()];
        for (idx, &v) in &self.coeffs {
            let reduced: Vec<usize> = idx
                .iter()
                .zip(&sizes)
                .map(|(&j, &m)| j.rem_euclid(m as i64) as usize)
                .collect();
            out[rank_sizes(&reduced, &sizes)] += v;
        }
        Ok(out)
    }

    /// Coefficients of the product `f·g` (discrete convolution).
    pub fn multiply(&self, other: &SymbolSpec) -> Result<SymbolSpec> {
        if self.d != other.d {
            return domain(format!("cannot multiply symbols with {} and {} levels", self.d, other.d));
        }
        let mut out = SymbolSpec::new(self.d);
        for (i, &a) in &self.coeffs {
            for (j, &b) in &other.coeffs {
                out.accumulate(i.add(j)?, a * b);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Dense copy of the coefficients with indices in `lo..=hi`.
    pub(crate) fn dense_table(&self, lo: &[i64], hi: &[i64]) -> CoeffTable {
        CoeffTable::new(self, lo, hi)
    }

    fn check_sizes(&self, n: &MultiIndex) -> Result<Vec<usize>> {
        let sizes = n.sizes()?;
        if sizes.len() != self.d {
            return domain(format!("size vector {n} does not have {} levels", self.d));
        }
        Ok(sizes)
    }

    fn accumulate(&mut self, idx: MultiIndex, v: C64) {
        *self.coeffs.entry(idx).or_insert(ZERO) += v;
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, v| *v != ZERO);
    }

    /// Text form: one line per coefficient, `j1 ... jd re im`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (idx, v) in &self.coeffs {
            for j in idx.iter() {
                write!(out, "{j} ").unwrap();
            }
            writeln!(out, "{} {}", v.re, v.im).unwrap();
        }
        out
    }

    /// Parses [`SymbolSpec::to_text`] output. Blank lines and `#` comments are skipped;
    /// the number of levels is inferred from the first data line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut spec: Option<SymbolSpec> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() < 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected `j1 .. jd re im`, got {} tokens",
                    lineno + 1,
                    tokens.len()
                )));
            }
            let d = tokens.len() - 2;
            let s = spec.get_or_insert_with(|| SymbolSpec::new(d));
            if s.d != d {
                return Err(Error::Parse(format!(
                    "line {}: {d} index columns, earlier lines had {}",
                    lineno + 1,
                    s.d
                )));
            }
            let idx = tokens[..d]
                .iter()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("line {}: bad index: {e}", lineno + 1)))?;
            let parse_f = |t: &str| {
                t.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: bad value `{t}`: {e}", lineno + 1)))
            };
            let v = C64::new(parse_f(tokens[d])?, parse_f(tokens[d + 1])?);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Parse(format!("line {}: non-finite coefficient", lineno + 1)));
            }
            s.accumulate(MultiIndex::new(idx), v);
        }
        let mut s = spec.ok_or_else(|| Error::Parse("no coefficients found".into()))?;
        s.prune();
        Ok(s)
    }
}

/// Dense lookup table for the coefficients of a symbol over an index box `lo..=hi`.
pub(crate) struct CoeffTable {
    lo: Vec<i64>,
    extent: Vec<usize>,
    values: Vec<C64>,
}

impl CoeffTable {
    fn new(s: &SymbolSpec, lo: &[i64], hi: &[i64]) -> Self {
        let extent: Vec<usize> = lo.iter().zip(hi).map(|(l, h)| (h - l + 1).max(0) as usize).collect();
        let mut values = vec![ZERO; extent.iter().product()];
        'outer: for (idx, &v) in &s.coeffs {
            let mut rel = Vec::with_capacity(lo.len());
            for ((&j, &l), &e) in idx.iter().zip(lo).zip(&extent) {
                let r = j - l;
                if r < 0 || r as usize >= e {
                    continue 'outer;
                }
                rel.push(r as usize);
            }
            values[rank_sizes(&rel, &extent)] = v;
        }
        CoeffTable { lo: lo.to_vec(), extent, values }
    }

    #[inline]
    pub(crate) fn get(&self, idx: &[i64]) -> C64 {
        let mut pos = 0usize;
        for ((&j, &l), &e) in idx.iter().zip(&self.lo).zip(&self.extent) {
            let r = j - l;
            if r < 0 || r as usize >= e {
                return ZERO;
            }
            pos = pos * e + r as usize;
        }
        self.values[pos]
    }
}

/// `sum_j a_j exp(i <j, x>)`.
pub fn eval_symbol(s: &SymbolSpec, x: &[f64]) -> C64 {
    s.iter()
        .map(|(j, &a)| {
            let phase: f64 = j.iter().zip(x).map(|(&jk, &xk)| jk as f64 * xk).sum();
            a * C64::from_polar(1.0, phase)
        })
        .sum()
}

pub type Sampler = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

/// A symbol known only through point evaluations on `(-π, π)^d`.
///
/// The sampler is assumed 2π-periodic in every variable.
#[derive(Clone)]
pub struct SampledSymbol {
    pub d: usize,
    pub sampler: Sampler,
    /// Grid points per level; `None` picks `4·(cutoff + 1)`.
    pub grid: Option<usize>,
}

impl SampledSymbol {
    pub fn new(d: usize, sampler: impl Fn(&[f64]) -> C64 + Send + Sync + 'static) -> Self {
        SampledSymbol { d, sampler: Arc::new(sampler), grid: None }
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = Some(grid);
        self
    }
}

/// Fourier coefficients `|j_k| <= cutoff_k` by the rectangle rule on a uniform periodic grid.
pub fn fourier_coeffs_from_samples(g: &SampledSymbol, cutoff: &MultiIndex) -> Result<SymbolSpec> {
    if cutoff.len() != g.d {
        return domain(format!("cutoff {cutoff} does not have {} levels", g.d));
    }
    let cut = cutoff.sizes()?;
    let max_cut = *cut.iter().max().unwrap_or(&1);
    let grid = g.grid.unwrap_or(4 * (max_cut + 1));
    if let Some(&c) = cut.iter().find(|&&c| grid < 2 * c + 1) {
        return config(format!("grid of {grid} points per level is too small for cutoff {c}"));
    }

    let grid_sizes = vec![grid; g.d];
    let h = 2.0 * PI / grid as f64;
    let samples: Vec<(Vec<f64>, C64)> = box_indices(&grid_sizes)
        .map(|m| {
            let x: Vec<f64> = m.iter().map(|&mk| -PI + h * mk as f64).collect();
            let v = (g.sampler)(&x);
            (x, v)
        })
        .collect();
    let weight = 1.0 / samples.len() as f64;

    let extent: Vec<usize> = cut.iter().map(|&c| 2 * c + 1).collect();
    let mut out = SymbolSpec::new(g.d);
    for rel in box_indices(&extent) {
        let j: Vec<i64> = rel.iter().zip(&cut).map(|(&r, &c)| r as i64 - c as i64).collect();
        let sum: C64 = samples
            .iter()
            .map(|(x, v)| {
                let phase: f64 = j.iter().zip(x).map(|(&jk, &xk)| jk as f64 * xk).sum();
                v * C64::from_polar(1.0, -phase)
            })
            .sum();
        out.accumulate(MultiIndex::new(j), sum * weight);
    }
    out.prune();
    Ok(out)
}

/// Coefficients of `|f|^2`: `b_k = sum_j a_{j+k} conj(a_j)`.
pub fn autocorrelate(s: &SymbolSpec) -> SymbolSpec {
    let mut out = SymbolSpec::new(s.d);
    for (p, &ap) in &s.coeffs {
        for (q, &aq) in &s.coeffs {
            let k = p.sub(q).expect("same number of levels");
            out.accumulate(k, ap * aq.conj());
        }
    }
    out.prune();
    out
}

/// Coefficients of the folded square `(1/α̂) sum_{l=0}^{α-e} |f|^2((x + 2πl)/α)`.
///
/// The coefficient at `j` is the autocorrelation coefficient at `α∘j`.
pub fn folded_square_symbol(s: &SymbolSpec, alpha: &MultiIndex) -> Result<SymbolSpec> {
    if alpha.len() != s.d {
        return domain(format!("shift {alpha} does not have {} levels", s.d));
    }
    if !alpha.is_positive() {
        return domain(format!(
            "folding needs a strictly positive shift, got {alpha}; use the zero-shift reduction"
        ));
    }
    let auto = autocorrelate(s);
    let mut out = SymbolSpec::new(s.d);
    'outer: for (k, &v) in &auto.coeffs {
        let mut j = Vec::with_capacity(s.d);
        for (&kk, &a) in k.iter().zip(alpha.iter()) {
            if kk.rem_euclid(a) != 0 {
                continue 'outer;
            }
            j.push(kk / a);
        }
        out.accumulate(MultiIndex::new(j), v);
    }
    out.prune();
    Ok(out)
}

/// The distribution symbol `θ(x, t)` of an α-Toeplitz sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSymbol {
    /// Coefficients of the folded square.
    pub base: SymbolSpec,
    pub alpha: MultiIndex,
}

impl ThetaSymbol {
    pub fn new(s: &SymbolSpec, alpha: &MultiIndex) -> Result<Self> {
        Ok(ThetaSymbol { base: folded_square_symbol(s, alpha)?, alpha: alpha.clone() })
    }

    /// `α̂`, the measure ratio of the nonzero branch is `1/α̂`.
    pub fn alpha_hat(&self) -> f64 {
        self.alpha.product() as f64
    }

    /// `sqrt` of the folded square at `x`, ignoring `t`.
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        let v = eval_symbol(&self.base, x).re;
        if v < -FOLD_CLIP_TOL {
            // Beyond round-off; still clipped, the caller sees a zero.
            return 0.0;
        }
        v.max(0.0).sqrt()
    }
}

/// `θ(x, t)`: the folded magnitude when every `t_k <= 1/α_k`, zero otherwise.
pub fn theta_eval(th: &ThetaSymbol, x: &[f64], t: &[f64]) -> f64 {
    let inside = t.iter().zip(th.alpha.iter()).all(|(&tk, &a)| tk <= 1.0 / a as f64);
    if inside {
        th.magnitude(x)
    } else {
        0.0
    }
}
