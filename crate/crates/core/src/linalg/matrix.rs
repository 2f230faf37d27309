use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Dense real symmetric matrix.
///
/// Storage is a full row-major square, but every mutation writes both
/// `(i, j)` and `(j, i)`, so the two triangles are always bit-identical.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * m.n + i] = v;
        }
        m
    }

    /// Builds a matrix by evaluating `f(i, j)` for `i <= j` and mirroring.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Validates that `rows` is square, finite and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: n * n,
                right: data.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if j > i && v != data[j * n + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { n, data })
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(k) => Err(Error::NonFinite {
                row: k / self.n,
                col: k % self.n,
            }),
            None => Ok(()),
        }
    }

    pub(crate) fn check_same_order(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.n, other.n, "order mismatch");
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    /// `D M D` for a diagonal `D` given by `diag`.
    pub fn congruence_diagonal(&self, diag: &[f64]) -> Self {
        assert_eq!(self.n, diag.len(), "order mismatch");
        Self::from_fn(self.n, |i, j| diag[i] * self.get(i, j) * diag[j])
    }

    /// Relabels indices: `result(perm[i], perm[j]) = self(i, j)`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(self.n, perm.len(), "order mismatch");
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in i..self.n {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len(), "order mismatch");
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// Ordinary matrix product; the result is returned as a dense row-major
    /// buffer since the product of symmetric matrices need not be symmetric.
    pub fn matmul(&self, other: &Self) -> DenseMatrix {
        assert_eq!(self.n, other.n, "order mismatch");
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                axpy(a, other.row(k), out_row);
            }
        }
        DenseMatrix { n, data: out }
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        dot(&self.mul_vec(v), v)
    }
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymmetricMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.n.min(8)])?;
        }
        Ok(())
    }
}

impl Add for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn add(self, rhs: Self) -> SymmetricMatrix {
        self.add_scaled(rhs, 1.0)
    }
}

impl Sub for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn sub(self, rhs: Self) -> SymmetricMatrix {
        self.add_scaled(rhs, -1.0)
    }
}

impl Mul<f64> for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn mul(self, rhs: f64) -> SymmetricMatrix {
        self.scale(rhs)
    }
}

/// Square row-major matrix without symmetry guarantees, used for
/// intermediate products.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute difference between this matrix and its transpose.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Symmetric part `(M + Mᵀ)/2`.
    pub fn symmetric_part(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(self.n, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_mirrors() {
        let mut m = SymmetricMatrix::zeros(3);
        m.set(0, 2, 5.0);
        assert_eq!(m.get(2, 0), 5.0);
    }

    #[test]
    fn from_rows_rejects_asymmetry_and_nan() {
        let bad = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]);
        assert!(matches!(bad, Err(Error::NotSymmetric { .. })));
        let nan = SymmetricMatrix::from_rows(&[vec![f64::NAN]]);
        assert!(matches!(nan, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn permuted_relabels_entries() {
        let m = SymmetricMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 5.0],
            vec![3.0, 5.0, 6.0],
        ])
        .unwrap();
        let p = m.permuted(&[2, 0, 1]);
        assert_eq!(p.get(2, 0), m.get(0, 1));
        assert_eq!(p.get(1, 1), m.get(2, 2));
    }
}
