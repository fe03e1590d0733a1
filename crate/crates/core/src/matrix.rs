use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real symmetric matrix stored as its packed lower triangle.
///
/// Only one copy of each off-diagonal entry exists, so `M[i][j] == M[j][i]`
/// holds by construction rather than up to a tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    n: usize,
    packed: Vec<f64>,
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, packed: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the lower triangle `i >= j`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                packed.push(f(i, j));
            }
        }
        Self { n, packed }
    }

    /// Accepts a square row-major array only if it is exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::spec("matrix rows must form a square array"));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::spec(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_lower_fn(n, |i, j| rows[i][j]))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[idx(i, j)] = v;
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == 0.0))
    }

    /// `self + c * Id`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.clone();
        m.add_to_diag(c);
        m
    }

    pub fn add_to_diag(&mut self, c: f64) {
        if c != 0.0 {
            for i in 0..self.n {
                self.packed[idx(i, i)] += c;
            }
        }
    }

    pub fn scale(&mut self, c: f64) {
        self.packed.iter_mut().for_each(|v| *v *= c);
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n: self.n, packed: self.packed.iter().map(|&v| f(v)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            packed: self.packed.iter().zip(&other.packed).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    /// Full row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.get(i, j);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        a
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Principal submatrix with row/column `j` removed.
    pub fn minor(&self, j: usize) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|&k| k != j).collect();
        Self::from_lower_fn(keep.len(), |a, b| self.get(keep[a], keep[b]))
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_by_construction() {
        let mut m = SymMatrix::zeros(3);
        m.set(0, 2, 5.0);
        assert_eq!(m.get(2, 0), 5.0);
        assert_eq!(m.to_rows()[0][2], m.to_rows()[2][0]);
    }

    #[test]
    fn rejects_asymmetric_rows() {
        let rows = vec![vec![1.0, 2.0], vec![2.5, 1.0]];
        assert!(SymMatrix::from_rows(&rows).is_err());
        let ok = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert_eq!(SymMatrix::from_rows(&ok).unwrap().get(1, 0), 2.0);
    }

    #[test]
    fn minor_drops_row_and_column() {
        let m = SymMatrix::from_lower_fn(3, |i, j| (10 * i + j) as f64);
        let mm = m.minor(1);
        assert_eq!(mm.n(), 2);
        assert_eq!(mm.get(1, 0), m.get(2, 0));
        assert_eq!(mm.get(1, 1), m.get(2, 2));
    }

    #[test]
    fn serde_roundtrip_through_rows() {
        let m = SymMatrix::from_lower_fn(3, |i, j| (i + 2 * j) as f64);
        let s = serde_json::to_string(&m).unwrap();
        let back: SymMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }
}
