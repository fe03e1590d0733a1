use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

const MAX_QL_ITERATIONS: usize = 60;

/// Reduces a dense symmetric matrix to tridiagonal form by Householder
/// reflections. Only the lower triangle of `a` (row-major, `n x n`) is read.
/// Returns `(diagonal, subdiagonal)` where `sub[i]` couples rows `i` and `i+1`.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let row_i = i * n;
        if l > 0 {
            let scale: f64 = a[row_i..row_i + l + 1].iter().map(|v| v.abs()).sum();
            if scale == 0.0 {
                e[i] = a[row_i + l];
                continue;
            }
            let mut h = 0.0;
            for k in 0..=l {
                a[row_i + k] /= scale;
                h += a[row_i + k] * a[row_i + k];
            }
            let f = a[row_i + l];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            a[row_i + l] = f - g;
            // p = A u / h with u = a[i][0..=l], using the lower triangle row-wise.
            for v in p[..=l].iter_mut() {
                *v = 0.0;
            }
            for j in 0..=l {
                let row_j = j * n;
                let uj = a[row_i + j];
                let mut acc = 0.0;
                for k in 0..j {
                    let ajk = a[row_j + k];
                    acc += ajk * a[row_i + k];
                    p[k] += ajk * uj;
                }
                acc += a[row_j + j] * uj;
                p[j] += acc;
            }
            let mut f = 0.0;
            for j in 0..=l {
                p[j] /= h;
                f += p[j] * a[row_i + j];
            }
            let hh = f / (h + h);
            for j in 0..=l {
                p[j] -= hh * a[row_i + j];
            }
            for j in 0..=l {
                let row_j = j * n;
                let uj = a[row_i + j];
                let qj = p[j];
                for k in 0..=j {
                    a[row_j + k] -= uj * p[k] + qj * a[row_i + k];
                }
            }
        } else {
            e[i] = a[row_i + l];
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    // Shift so that e[i] couples i and i+1.
    if n > 0 {
        e.remove(0);
        e.push(0.0);
    }
    (d, e)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix; eigenvalues land in `d`.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence { what: "tridiagonal QL", iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of `m` in ascending order.
pub fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.to_dense();
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    tql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of a symmetric tridiagonal matrix, ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], sub: &[f64]) -> Result<Vec<f64>> {
    let mut d = diag.to_vec();
    let mut e = sub.to_vec();
    e.resize(d.len(), 0.0);
    tql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Threshold below which an eigenvalue counts as an exact zero.
pub fn zero_threshold(n: usize, norm: f64) -> f64 {
    n as f64 * f64::EPSILON * norm.max(1.0)
}

/// `(sign, log|det|)` from a list of eigenvalues of an `n x n` matrix whose
/// Frobenius norm is `norm`.
pub fn sign_log_abs_det_from_eigs(eigs: &[f64], norm: f64) -> (i8, f64) {
    let tol = zero_threshold(eigs.len(), norm);
    let mut sign = 1i8;
    let mut logabs = 0.0;
    for &l in eigs {
        if l.abs() < tol {
            return (0, f64::NEG_INFINITY);
        }
        if l < 0.0 {
            sign = -sign;
        }
        logabs += l.abs().ln();
    }
    (sign, logabs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_closed_forms() {
        assert_eq!(eigenvalues(&SymMatrix::identity(3)).unwrap(), vec![1.0; 3]);
        assert_eq!(eigenvalues(&SymMatrix::from_diag(&[3.0, -1.0, 2.0])).unwrap(), vec![-1.0, 2.0, 3.0]);
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn tridiagonal_path() {
        // Path graph on 3 vertices: eigenvalues -sqrt2, 0, sqrt2.
        let ev = tridiagonal_eigenvalues(&[0.0; 3], &[1.0, 1.0]).unwrap();
        let s = 2f64.sqrt();
        for (a, b) in ev.iter().zip([-s, 0.0, s]) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
