//! Small dense kernels: LU determinants, Householder QR and complex
//! Gauss–Jordan inversion.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows);
        let mut out = Dense::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Euclidean norm of column `j`.
    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self.get(i, j).powi(2)).sum::<f64>().sqrt()
    }
}

/// `(sign, log|det|)` of a square row-major matrix by LU with partial
/// pivoting. An exactly zero pivot gives `(0, -inf)`.
pub fn lu_sign_log_det(mut a: Vec<f64>, n: usize) -> (f64, f64) {
    assert_eq!(a.len(), n * n);
    let mut sign = 1.0;
    let mut logabs = 0.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        if pivot < 0.0 {
            sign = -sign;
        }
        logabs += pivot.abs().ln();
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    (sign, logabs)
}

/// Plain determinant through [`lu_sign_log_det`].
pub fn det(a: Vec<f64>, n: usize) -> f64 {
    let (s, l) = lu_sign_log_det(a, n);
    if s == 0.0 {
        0.0
    } else {
        s * l.exp()
    }
}

/// Householder QR of a square matrix. Returns the explicit `Q` and the
/// diagonal of `R`.
pub fn householder_qr(a: &Dense) -> (Dense, Vec<f64>) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    // Work on the transpose so that columns of `a` are contiguous rows.
    let mut at = a.transpose();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n);
    let mut rdiag = vec![0.0; n];
    for k in 0..n {
        let col = &at.data[k * n + k..(k + 1) * n];
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x0 = col[0];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col.to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        rdiag[k] = alpha;
        if vnorm2 == 0.0 {
            vs.push(v);
            betas.push(0.0);
            rdiag[k] = x0;
            continue;
        }
        let beta = 2.0 / vnorm2;
        for j in k + 1..n {
            let c = &mut at.data[j * n + k..(j + 1) * n];
            let dot: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
            let f = beta * dot;
            for (ci, vi) in c.iter_mut().zip(&v) {
                *ci -= f * vi;
            }
        }
        vs.push(v);
        betas.push(beta);
    }
    // Q = H_0 H_1 ... H_{n-1}; accumulate on the rows of Q^T.
    let mut qt = Dense::identity(n);
    for k in (0..n).rev() {
        let v = &vs[k];
        let beta = betas[k];
        if beta == 0.0 {
            continue;
        }
        // Q <- H_k Q, i.e. Q^T <- Q^T H_k acting on columns k.. of each row.
        for r in 0..n {
            let row = &mut qt.data[r * n + k..(r + 1) * n];
            let dot: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            let f = beta * dot;
            if f != 0.0 {
                for (ri, vi) in row.iter_mut().zip(v) {
                    *ri -= f * vi;
                }
            }
        }
    }
    // qt now holds (H_0 ... H_{n-1})^T applied to identity rows, i.e. Q^T.
    (qt.transpose(), rdiag)
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = CMatrix::identity(n).data;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                    inv.swap(k * n + j, p * n + j);
                }
            }
            let piv = a[k * n + k].inv();
            for j in 0..n {
                a[k * n + j] *= piv;
                inv[k * n + j] *= piv;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let akj = a[k * n + j];
                    let ikj = inv[k * n + j];
                    a[i * n + j] -= f * akj;
                    inv[i * n + j] -= f * ikj;
                }
            }
        }
        Ok(CMatrix { n, data: inv })
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                x.swap(k, p);
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
                let xk = x[k];
                x[i] -= f * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s -= a[k * n + j] * x[j];
            }
            x[k] = s / a[k * n + k];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_det_of_small_matrices() {
        assert_eq!(det(vec![2.0, 0.0, 0.0, -3.0], 2), -6.0);
        let d = det(vec![0.0, 1.0, 1.0, 0.0], 2);
        assert!((d + 1.0).abs() < 1e-15);
        assert_eq!(lu_sign_log_det(vec![1.0, 2.0, 2.0, 4.0], 2).0, 0.0);
    }

    #[test]
    fn qr_reconstructs_and_is_orthogonal() {
        let a = Dense::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 3.0 } else { 0.0 });
        let (q, rdiag) = householder_qr(&a);
        let qtq = q.transpose().matmul(&q);
        for i in 0..5 {
            for j in 0..5 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((qtq.get(i, j) - e).abs() < 1e-12);
            }
        }
        // |det A| = prod |R_ii|
        let da = det(a.data.clone(), 5).abs();
        let dr: f64 = rdiag.iter().map(|v| v.abs()).product();
        assert!((da - dr).abs() < 1e-9 * da.max(1.0));
        // R = Q^T A is upper triangular
        let r = q.transpose().matmul(&a);
        for i in 0..5 {
            for j in 0..i {
                assert!(r.get(i, j).abs() < 1e-10);
            }
            assert!((r.get(i, i) - rdiag[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_inverse_and_solve_agree() {
        let n = 4;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, Complex64::new((i + j) as f64 * 0.3, if i == j { 1.0 } else { 0.1 }));
            }
        }
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - Complex64::new(e, 0.0)).norm() < 1e-12);
            }
        }
        let b: Vec<Complex64> = (0..n).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let x = m.solve(&b).unwrap();
        for i in 0..n {
            let xi: Complex64 = (0..n).map(|j| inv.get(i, j) * b[j]).sum();
            assert!((xi - x[i]).norm() < 1e-12);
        }
    }
}
