use detlab::ensembles::sample;
use detlab::experiments::{hadamard_trials, lemma_b2_max_second_difference, log_mean_exp, mean_stderr};
use detlab::linalg::Dense;
use detlab::spectral::{
    bl_distance, convex3_pieces, cut_entries, eigenvalues, hadamard_logs, ks_distance, log_eta_k, rank_upper_bound,
    schur_resolvent_diag, w1_distance, Convex5,
};
use detlab::{EmpiricalMeasure, EnsembleSpec, EntryDistribution, ReferenceMeasure};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn convex3_sums_to_capped_log(x in -50.0f64..50.0, eta in 1e-3f64..1.0, k in 2.0f64..100.0) {
        let (a, b, c) = convex3_pieces(x, eta, k);
        prop_assert!((a + b + c - log_eta_k(x, eta, k)).abs() <= 1e-10);
    }

    #[test]
    fn convex5_sums_to_capped_log(x in -6.0f64..6.0, e in -3.0f64..3.0, eta in 0.01f64..0.5) {
        let c = Convex5::new(e, eta, 1e3).unwrap();
        let p = c.pieces(x);
        let scale = p.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((p.iter().sum::<f64>() - log_eta_k(x * x - e, eta, 1e3)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn schur_identity(seed in 0u64..10_000, re in -3.0f64..3.0, im in 1e-2f64..3.0, j in 0usize..12) {
        let m = sample(&EnsembleSpec::wigner(12, EntryDistribution::uniform(), 0.0), seed).unwrap();
        let (d, s) = schur_resolvent_diag(&m, Complex64::new(re, im), j).unwrap();
        prop_assert!((d - s).norm() <= 1e-10 * d.norm());
    }

    #[test]
    fn truncation_respects_rank_bound(seed in 0u64..10_000, level in 0.01f64..0.3) {
        let h = sample(&EnsembleSpec::wigner(40, EntryDistribution::student_t(3.0), 0.0), seed).unwrap();
        let cut = cut_entries(&h, level);
        let ks = ks_distance(&EmpiricalMeasure::new(eigenvalues(&h).unwrap()), &EmpiricalMeasure::new(eigenvalues(&cut).unwrap()));
        prop_assert!(ks <= rank_upper_bound(&h.sub(&cut)) as f64 / 40.0 + 1e-15);
    }

    #[test]
    fn bounded_lipschitz_below_w1_and_two(seed in 0u64..10_000, c in -3.0f64..3.0) {
        let a = EmpiricalMeasure::new(eigenvalues(&sample(&EnsembleSpec::goe(30), seed).unwrap()).unwrap());
        let b = ReferenceMeasure::semicircle_at(1.0, c);
        let bl = bl_distance(&a, &b);
        prop_assert!(bl <= w1_distance(&a, &b) + 1e-15);
        prop_assert!(bl <= 2.0);
    }

    #[test]
    fn annealed_dominates_quenched(xs in prop::collection::vec(-50.0f64..50.0, 1..40)) {
        prop_assert!(log_mean_exp(&xs).0 >= mean_stderr(&xs).0 - 1e-12);
    }

    #[test]
    fn hadamard_inequality(rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 6)) {
        let a = Dense::from_fn(6, 6, |i, j| rows[i][j]);
        let (d, c) = hadamard_logs(&a);
        prop_assert!(d <= c + 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn lemma_b2_concavity(a in 0.0f64..5.0, b in 0.0f64..5.0, p in 1.0f64..6.0) {
        prop_assert!(lemma_b2_max_second_difference(a, b, p, 0.01, 100.0, 2_000) <= 1e-10);
    }
}

#[test]
fn convex_pieces_have_declared_curvature() {
    for &(e, eta) in &[(-1.0, 0.1), (0.0, 0.05), (0.7, 0.05), (2.0, 0.2)] {
        let c = Convex5::new(e, eta, 50.0).unwrap();
        let signs = c.curvature_signs();
        let h = 1e-3;
        for k in -3000..=3000 {
            let x = k as f64 * 1e-3;
            let (l, m, r) = (c.pieces(x - h), c.pieces(x), c.pieces(x + h));
            for i in 0..5 {
                let d2 = l[i] - 2.0 * m[i] + r[i];
                let tol = 1e-12 * (1.0 + m[i].abs());
                match signs[i] {
                    1 => assert!(d2 >= -tol, "E={e} piece {i} at {x}: {d2}"),
                    -1 => assert!(d2 <= tol, "E={e} piece {i} at {x}: {d2}"),
                    _ => assert_eq!(m[i], 0.0),
                }
            }
        }
    }
}

#[test]
fn hadamard_on_gaussian_matrices() {
    let t = hadamard_trials(15, 100, 3);
    assert_eq!(t.len(), 100);
    assert!(t.iter().all(|(d, c)| d <= c));
}
