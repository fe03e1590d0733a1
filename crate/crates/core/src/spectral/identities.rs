//! Exact linear-algebra identities used by the proofs, exposed as checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{lu_sign_log_det, CMatrix, Dense};
use crate::matrix::SymMatrix;

fn shifted_complex(m: &SymMatrix, z: Complex64) -> CMatrix {
    let n = m.n();
    let mut c = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            c.set(i, j, Complex64::new(m.get(i, j), 0.0));
        }
        c.set(i, i, Complex64::new(m.get(i, i), 0.0) - z);
    }
    c
}

/// `((M - z)^{-1})_{jj}` computed directly and through the Schur complement
/// `1 / (M_jj - z - h_jᵀ (M^{(j)} - z)^{-1} h_j)`.
pub fn schur_resolvent_diag(m: &SymMatrix, z: Complex64, j: usize) -> Result<(Complex64, Complex64)> {
    let n = m.n();
    if j >= n {
        return Err(Error::param(format!("index {j} out of range for N={n}")));
    }
    if z.im <= 0.0 {
        return Err(Error::param("spectral parameter must have Im z > 0"));
    }
    let mut ej = vec![Complex64::new(0.0, 0.0); n];
    ej[j] = Complex64::new(1.0, 0.0);
    let direct = shifted_complex(m, z).solve(&ej).map_err(|_| Error::SingularMinor)?[j];

    let h: Vec<Complex64> = (0..n).filter(|&k| k != j).map(|k| Complex64::new(m.get(k, j), 0.0)).collect();
    let quad = if n > 1 {
        let x = shifted_complex(&m.minor(j), z).solve(&h).map_err(|_| Error::SingularMinor)?;
        h.iter().zip(&x).map(|(a, b)| a * b).sum()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let schur = (Complex64::new(m.get(j, j), 0.0) - z - quad).inv();
    Ok((direct, schur))
}

/// Zeroes every entry with `|M_ij| > threshold`.
pub fn cut_entries(m: &SymMatrix, threshold: f64) -> SymMatrix {
    m.map(|v| if v.abs() > threshold { 0.0 } else { v })
}

/// Upper bound on `rank(D)`: the number of rows of `D` with a nonzero entry.
pub fn rank_upper_bound(d: &SymMatrix) -> usize {
    let n = d.n();
    (0..n).filter(|&i| (0..n).any(|j| d.get(i, j) != 0.0)).count()
}

/// `(|det A|, Π_i ‖column_i(A)‖)` for a square matrix. Hadamard's inequality
/// says the first never exceeds the second. Both returned as logarithms.
pub fn hadamard_logs(a: &Dense) -> (f64, f64) {
    let (_, logdet) = lu_sign_log_det(a.data.clone(), a.rows);
    let logcols = (0..a.cols).map(|j| a.column_norm(j).ln()).sum();
    (logdet, logcols)
}
