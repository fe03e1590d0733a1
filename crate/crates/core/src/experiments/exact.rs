//! Deterministic property checks with no Monte Carlo tolerance.

use num_complex::Complex64;
use rand::Rng as _;
use serde::Serialize;

use super::checks::{hadamard_trials, lemma_b2_max_second_difference, CONCAVITY_TOL};
use crate::ensembles::{sample, EnsembleSpec};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::spectral::{convex3_pieces, log_eta_k, schur_resolvent_diag, Convex5};

/// Tolerance for sum identities and the Schur identity.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCheck {
    pub energy: f64,
    pub eta: f64,
    pub k: f64,
    pub points: usize,
    /// `max |log_1 + log_2 + log_3 - log_η^K|` over the grid.
    pub convex3_residual: f64,
    /// `max |Σ pieces - log_η^K(x² - E)| / max(1, Σ |pieces|)` over the grid.
    /// The outer slopes grow like `E²/η²`, so the pieces cancel at that scale.
    pub convex5_residual: f64,
    /// Grid points where a second difference has the wrong sign.
    pub curvature_violations: usize,
    /// Grid steps where a piece moves faster than its Lipschitz bound.
    pub lipschitz_violations: usize,
    pub convex5_lipschitz: f64,
    pub passed: bool,
}

/// `slope_scale` bounds `|slope · x|`: the pieces are evaluated as
/// `c (x - b) + d` with `|c b|` far above `|f|`, and rounding follows `|c b|`.
fn second_difference_ok(sign: i8, f: [f64; 3], slope_scale: f64) -> bool {
    let d2 = f[0] - 2.0 * f[1] + f[2];
    let tol = 1e-12 * (1.0 + f[1].abs() + slope_scale);
    match sign {
        1 => d2 >= -tol,
        -1 => d2 <= tol,
        _ => f.iter().all(|v| *v == 0.0),
    }
}

/// Checks both decompositions of the regularized logarithm on uniform grids
/// over `[-range, range]`.
pub fn decomposition_check(energy: f64, eta: f64, k: f64, range: f64, points: usize) -> Result<DecompositionCheck> {
    if points < 3 || !(range > 0.0) {
        return Err(Error::param("need at least 3 grid points and a positive range"));
    }
    let c5 = Convex5::new(energy, eta, k)?;
    let h = 2.0 * range / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| -range + h * i as f64).collect();

    let mut r3 = 0.0f64;
    let mut r5 = 0.0f64;
    let mut curv = 0;
    let mut lip = 0;
    let l3 = 0.5 / eta;
    let l5 = c5.lipschitz_bound();
    let p3: Vec<[f64; 3]> = xs
        .iter()
        .map(|&x| {
            let (a, b, c) = convex3_pieces(x, eta, k);
            r3 = r3.max((a + b + c - log_eta_k(x, eta, k)).abs());
            [a, b, c]
        })
        .collect();
    let p5: Vec<[f64; 5]> = xs
        .iter()
        .map(|&x| {
            let p = c5.pieces(x);
            let scale = p.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
            r5 = r5.max((p.iter().sum::<f64>() - log_eta_k(x * x - energy, eta, k)).abs() / scale);
            p
        })
        .collect();
    let signs3 = [1i8, -1, -1];
    let signs5 = c5.curvature_signs();
    for i in 1..points - 1 {
        let reach = 1.0 + xs[i].abs();
        for (j, &s) in signs3.iter().enumerate() {
            curv += !second_difference_ok(s, [p3[i - 1][j], p3[i][j], p3[i + 1][j]], l3 * reach) as usize;
        }
        for (j, &s) in signs5.iter().enumerate() {
            curv += !second_difference_ok(s, [p5[i - 1][j], p5[i][j], p5[i + 1][j]], l5 * reach) as usize;
        }
    }
    for i in 0..points - 1 {
        for j in 0..3 {
            lip += ((p3[i + 1][j] - p3[i][j]).abs() > l3 * h * (1.0 + 1e-9) + 1e-12) as usize;
        }
        for j in 0..5 {
            lip += ((p5[i + 1][j] - p5[i][j]).abs() > l5 * h * (1.0 + 1e-9) + 1e-12) as usize;
        }
    }
    let passed = r3 <= IDENTITY_TOL && r5 <= IDENTITY_TOL && curv == 0 && lip == 0;
    Ok(DecompositionCheck {
        energy,
        eta,
        k,
        points,
        convex3_residual: r3,
        convex5_residual: r5,
        curvature_violations: curv,
        lipschitz_violations: lip,
        convex5_lipschitz: l5,
        passed,
    })
}

/// Largest relative gap between the direct and Schur-complement resolvent
/// entries over `trials` random GOE matrices, `z` and `j`.
pub fn schur_identity_check(n: usize, trials: usize, seed: u64) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in 0..trials {
        let s = derive_seed(seed, "schur", t as u64);
        let m = sample(&EnsembleSpec::goe(n), s)?;
        let mut rng = rng_from_seed(s ^ 0x9e37_79b9_7f4a_7c15);
        let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(0.01..2.0));
        let j = rng.random_range(0..n);
        let (d, sc) = schur_resolvent_diag(&m, z, j)?;
        worst = worst.max((d - sc).norm() / d.norm());
    }
    Ok(worst)
}

/// Number of `n x n` Gaussian matrices (out of `count`) obeying Hadamard's
/// inequality `log|det A| <= Σ log‖a_j‖`.
pub fn hadamard_check(n: usize, count: usize, seed: u64) -> usize {
    hadamard_trials(n, count, seed).iter().filter(|(d, c)| *d <= *c + 1e-12 * c.abs().max(1.0)).count()
}

/// Random triples `a, b ∈ [0, 5]`, `p ∈ [1, 6]`; returns the number whose
/// second differences on `(0, 100]` stay below [`CONCAVITY_TOL`] and the
/// largest second difference seen.
pub fn concavity_random_triples(count: usize, points: usize, seed: u64) -> (usize, f64) {
    let mut rng = rng_from_seed(derive_seed(seed, "concavity", 0));
    let mut ok = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..count {
        let a = rng.random_range(0.0..5.0);
        let b = rng.random_range(0.0..5.0);
        let p = rng.random_range(1.0..6.0);
        let d = lemma_b2_max_second_difference(a, b, p, 100.0 / points as f64, 100.0, points);
        worst = worst.max(d);
        ok += (d <= CONCAVITY_TOL) as usize;
    }
    (ok, worst)
}

#[cfg(test)]
mod tests {
    use super::second_difference_ok;

    #[test]
    fn slope_scale_does_not_hide_kinks() {
        // |x| with h = 1e-3 has second difference 2e-3 at the kink.
        let f = [1e-3, 0.0, 1e-3];
        assert!(second_difference_ok(1, f, 1e4));
        assert!(!second_difference_ok(-1, f, 1e4));
    }
}
