//! Minimal dense complex matrix container.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::index::MultiIndex;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major dense matrix of double-precision complex scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return domain(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            ));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn scale(&self, s: C64) -> Self {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn kron(&self, other: &DenseMatrix) -> Self {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |r, c| {
            self.get(r / p, c / q) * other.get(r % p, c % q)
        })
    }

    /// Columns `start..start + count`.
    pub fn columns(&self, start: usize, count: usize) -> Result<Self> {
        if start + count > self.cols {
            return domain(format!(
                "column range {start}..{} exceeds {} columns",
                start + count,
                self.cols
            ));
        }
        Ok(Self::from_fn(self.rows, count, |r, c| self.get(r, start + c)))
    }

    pub fn hcat(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return domain(format!("cannot concatenate {} rows with {} rows", self.rows, other.rows));
        }
        let cols = self.cols + other.cols;
        Ok(Self::from_fn(self.rows, cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                other.get(r, c - self.cols)
            }
        }))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Column `c` as an owned vector.
    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// `rows cols` header, then one `re im` line per entry in row-major order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for z in &self.data {
            out.push_str(&format!("{:?} {:?}\n", z.re, z.im));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut dim = |what: &str| -> Result<usize> {
            let t = tokens.next().ok_or_else(|| Error::Parse(format!("missing {what}")))?;
            t.parse().map_err(|_| Error::Parse(format!("bad {what} `{t}`")))
        };
        let (rows, cols) = (dim("row count")?, dim("column count")?);
        let nums: Vec<f64> = tokens
            .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{t}`"))))
            .collect::<Result<_>>()?;
        if nums.len() != 2 * rows * cols {
            return Err(Error::Parse(format!(
                "expected {} numbers for a {rows}x{cols} matrix, found {}",
                2 * rows * cols,
                nums.len()
            )));
        }
        let m = DenseMatrix::from_vec(rows, cols, nums.chunks(2).map(|p| C64::new(p[0], p[1])).collect())?;
        if !m.is_finite() {
            return Err(Error::Parse("non-finite entry".into()));
        }
        Ok(m)
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return domain(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    AlphaCirculant,
    AlphaToeplitz,
    Circulant,
    Toeplitz,
    Shift,
    Fourier,
    Other,
}

/// A dense matrix tagged with the structure it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredMatrix {
    pub matrix: DenseMatrix,
    pub kind: MatrixKind,
    pub n: MultiIndex,
    pub alpha: Option<MultiIndex>,
}

impl StructuredMatrix {
    pub fn new(matrix: DenseMatrix, kind: MatrixKind, n: MultiIndex, alpha: Option<MultiIndex>) -> Self {
        StructuredMatrix { matrix, kind, n, alpha }
    }

    /// `n̂`, the product of the level sizes.
    pub fn size(&self) -> usize {
        self.n.product() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let a = DenseMatrix::from_vec(2, 1, vec![C64::new(0.1, -2.0), C64::new(1e-300, 3.0)]).unwrap();
        assert_eq!(a.to_text(), "2 1\n0.1 -2.0\n1e-300 3.0\n");
        assert_eq!(DenseMatrix::from_text(&a.to_text()).unwrap(), a);
        assert!(DenseMatrix::from_text("2 2\n1 0\n").is_err());
        assert!(DenseMatrix::from_text("1 1\nx 0\n").is_err());
        assert!(DenseMatrix::from_text("1 1\nNaN 0\n").is_err());
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = DenseMatrix::from_vec(2, 2, vec![ONE, C64::new(0.0, 1.0), ZERO, C64::new(2.0, 0.0)]).unwrap();
        let id = DenseMatrix::identity(2);
        assert_eq!(a.matmul(&id).unwrap(), a);
        let g = a.adjoint().matmul(&a).unwrap();
        assert_eq!(g.get(0, 1), C64::new(0.0, 1.0));
        assert_eq!(g.get(1, 0), C64::new(0.0, -1.0));
        assert_eq!(g.get(1, 1), C64::new(5.0, 0.0));
        assert!(a.matmul(&DenseMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn kron_shape_and_entries() {
        let a = DenseMatrix::from_real(2, 1, &[1.0, 2.0]).unwrap();
        let b = DenseMatrix::from_real(1, 2, &[3.0, 4.0]).unwrap();
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(k.get(1, 1), C64::new(8.0, 0.0));
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(DenseMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
    }

    #[test]
    fn hcat_columns_roundtrip() {
        let m = DenseMatrix::from_fn(3, 5, |r, c| C64::new(r as f64, c as f64));
        let left = m.columns(0, 2).unwrap();
        let right = m.columns(2, 3).unwrap();
        assert_eq!(left.hcat(&right).unwrap(), m);
        assert!(m.columns(4, 2).is_err());
    }
}
