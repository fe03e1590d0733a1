//! Cross-checks against nalgebra.

use detlab::ensembles::sample;
use detlab::linalg::{det, Dense};
use detlab::spectral::{eigenvalues, sign_log_abs_det};
use detlab::{EnsembleSpec, EntryDistribution, SymMatrix};
use nalgebra::DMatrix;

fn to_na(m: &SymMatrix) -> DMatrix<f64> {
    let n = m.n();
    DMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

#[test]
fn eigenvalues_match_nalgebra() {
    for (seed, n) in [(1, 5), (2, 40), (3, 150)] {
        let m = sample(&EnsembleSpec::wigner(n, EntryDistribution::rademacher(), 0.3), seed).unwrap();
        let ours = eigenvalues(&m).unwrap();
        let mut theirs: Vec<f64> = to_na(&m).symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-11, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn log_det_matches_lu() {
    for seed in 0..10 {
        let m = sample(&EnsembleSpec::goe(30), seed).unwrap();
        let (sign, logabs) = sign_log_abs_det(&m).unwrap();
        let d = to_na(&m).determinant();
        assert_eq!(sign as f64, d.signum());
        assert!((logabs - d.abs().ln()).abs() < 1e-10);
        assert!((det(m.to_dense(), 30) - d).abs() <= 1e-10 * d.abs());
    }
}

#[test]
fn degenerate_spectrum_gives_zero_sign() {
    let mut m = SymMatrix::zeros(4);
    m.set(0, 1, 1.0);
    m.set(2, 3, 1.0);
    m.set(1, 2, 1.0);
    m.set(0, 0, 1.0);
    m.set(3, 3, 1.0);
    // [[1,1,0,0],[1,0,1,0],[0,1,0,1],[0,0,1,1]] is singular
    let d = to_na(&m).determinant();
    let (sign, logabs) = sign_log_abs_det(&m).unwrap();
    assert!(d.abs() < 1e-12);
    assert_eq!(sign, 0);
    assert_eq!(logabs, f64::NEG_INFINITY);
}

#[test]
fn matmul_matches_nalgebra() {
    let a = Dense::from_fn(7, 5, |i, j| (i as f64 + 1.0).sin() * (j as f64 - 2.0));
    let b = Dense::from_fn(5, 3, |i, j| (i * j) as f64 - 1.5);
    let c = a.matmul(&b);
    let na = DMatrix::from_fn(7, 5, |i, j| a.get(i, j)) * DMatrix::from_fn(5, 3, |i, j| b.get(i, j));
    for i in 0..7 {
        for j in 0..3 {
            assert!((c.get(i, j) - na[(i, j)]).abs() < 1e-12);
        }
    }
}
