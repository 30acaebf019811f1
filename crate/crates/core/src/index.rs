//! Multi-indices and lexicographic linearization.
//!
//! A `MultiIndex` is used for three different roles: level sizes `n`, shift
//! vectors `alpha`, and (possibly negative) Fourier indices. All multilevel
//! matrices in the crate use the same row-major ordering, with the first
//! level outermost and the last level varying fastest.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Self {
        MultiIndex(entries)
    }

    pub fn from_sizes(sizes: &[usize]) -> Self {
        MultiIndex(sizes.iter().map(|&s| s as i64).collect())
    }

    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// The all-ones vector `e`.
    pub fn ones(d: usize) -> Self {
        MultiIndex(vec![1; d])
    }

    pub fn scalar(v: i64) -> Self {
        MultiIndex(vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &i64> + '_ {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&v| v > 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0)
    }

    /// Product of the entries (`n̂` when used as a size vector).
    pub fn product(&self) -> i64 {
        self.0.iter().product()
    }

    /// Entries as sizes. Fails if any entry is below 1.
    pub fn sizes(&self) -> Result<Vec<usize>> {
        if self.0.is_empty() {
            return domain("size vector must have at least one level");
        }
        self.0
            .iter()
            .map(|&v| {
                if v >= 1 {
                    Ok(v as usize)
                } else {
                    domain(format!("size vector {self} has a non-positive entry"))
                }
            })
            .collect()
    }

    /// Entries as shifts. Fails if any entry is negative.
    pub fn shifts(&self) -> Result<Vec<usize>> {
        self.0
            .iter()
            .map(|&v| {
                if v >= 0 {
                    Ok(v as usize)
                } else {
                    domain(format!("shift vector {self} has a negative entry"))
                }
            })
            .collect()
    }

    pub fn neg(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|v| -v).collect())
    }

    pub fn add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        check_len(self, other)?;
        Ok(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &MultiIndex) -> Result<MultiIndex> {
        check_len(self, other)?;
        Ok(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// Entries selected by `levels`, in that order.
    pub fn select(&self, levels: &[usize]) -> MultiIndex {
        MultiIndex(levels.iter().map(|&k| self.0[k]).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(v)
    }
}

impl std::ops::Index<usize> for MultiIndex {
    type Output = i64;
    fn index(&self, k: usize) -> &i64 {
        &self.0[k]
    }
}

fn check_len(a: &MultiIndex, b: &MultiIndex) -> Result<()> {
    if a.len() != b.len() {
        return domain(format!("multi-index length mismatch: {a} vs {b}"));
    }
    Ok(())
}

/// Row-major linear position of `idx` inside the box `0 <= idx < n`.
pub fn lex_rank(idx: &MultiIndex, n: &MultiIndex) -> Result<usize> {
    check_len(idx, n)?;
    let sizes = n.sizes()?;
    let mut pos = 0usize;
    for (&i, &m) in idx.iter().zip(&sizes) {
        if i < 0 || i as usize >= m {
            return domain(format!("index {idx} outside the box {n}"));
        }
        pos = pos * m + i as usize;
    }
    Ok(pos)
}

/// Inverse of [`lex_rank`].
pub fn lex_unrank(pos: usize, n: &MultiIndex) -> Result<MultiIndex> {
    let sizes = n.sizes()?;
    let total: usize = sizes.iter().product();
    if pos >= total {
        return domain(format!("position {pos} outside 0..{total}"));
    }
    Ok(MultiIndex(unrank_sizes(pos, &sizes).into_iter().map(|v| v as i64).collect()))
}

/// Componentwise floor modulus, landing in `[0, n_k - 1]`.
pub fn mod_vec(r: &MultiIndex, n: &MultiIndex) -> Result<MultiIndex> {
    check_len(r, n)?;
    n.sizes()?;
    Ok(MultiIndex(r.iter().zip(n.iter()).map(|(&a, &m)| a.rem_euclid(m)).collect()))
}

/// Componentwise product.
pub fn hadamard(a: &MultiIndex, b: &MultiIndex) -> Result<MultiIndex> {
    check_len(a, b)?;
    Ok(MultiIndex(a.iter().zip(b.iter()).map(|(x, y)| x * y).collect()))
}

// Unchecked helpers on plain size slices, used by the matrix builders.

pub(crate) fn unrank_sizes(mut pos: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        out[k] = pos % sizes[k];
        pos /= sizes[k];
    }
    out
}

pub(crate) fn rank_sizes(idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (&i, &m)| acc * m + i)
}

/// All indices of the box `sizes`, in lexicographic order.
pub(crate) fn box_indices(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = sizes.iter().product();
    (0..total).map(move |p| unrank_sizes(p, sizes))
}
