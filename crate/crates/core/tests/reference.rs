use detlab::reference::{
    block_mde_solve, free_convolve, mde_density, mde_solve, DensityOptions, FreeConvolution, MdeProblem,
};
use detlab::{ReferenceMeasure, SymMatrix};
use num_complex::Complex64;

fn m_sc(z: Complex64) -> Complex64 {
    ReferenceMeasure::semicircle(1.0).stieltjes(z)
}

#[test]
fn semicircle_log_potential() {
    let sc = ReferenceMeasure::semicircle(1.0);
    assert!((sc.log_potential(0.0) + 0.5).abs() < 1e-9);
    assert!((sc.log_potential(1.0) + 0.25).abs() < 1e-9);
    // outside the support: |E|(|E| - √(E²-4))/4 + log((|E| + √(E²-4))/2) - 1/2
    let e: f64 = 3.0;
    let r = (e * e - 4.0).sqrt();
    let exact = e * (e - r) / 4.0 + ((e + r) / 2.0).ln() - 0.5;
    assert!((sc.log_potential(-3.0) - exact).abs() < 1e-9);
}

#[test]
fn marchenko_pastur_log_potential_matches_dembo_limit() {
    let g: f64 = 0.5;
    let stirling = (1.0 - g) / g * (1.0 / (1.0 - g)).ln() - 1.0;
    let mp = ReferenceMeasure::marchenko_pastur(g).unwrap();
    assert!((mp.log_potential(0.0) - stirling).abs() < 1e-8);
    assert!((stirling + 0.306853).abs() < 1e-6);
    // exact finite-p value approaches the same limit
    let (p, n) = (2000usize, 4000usize);
    let finite: f64 = (0..p).map(|k| ((n - k) as f64 / n as f64).ln()).sum::<f64>() / p as f64;
    assert!((finite - stirling).abs() < 1e-3);
}

#[test]
fn flat_mde_reproduces_semicircle_stieltjes() {
    let prob = MdeProblem::flat_goe(10).unwrap();
    for k in 0..=80 {
        let z = Complex64::new(-4.0 + 0.1 * k as f64, 0.1);
        let m = mde_solve(&prob, z).unwrap().normalized_trace();
        assert!((m - m_sc(z)).norm() < 1e-6, "z={z}");
    }
}

#[test]
fn block_solver_with_one_component_matches_flat() {
    let n = 6;
    let means: Vec<SymMatrix> = (0..n).map(|_| SymMatrix::zeros(1)).collect();
    let variances = vec![vec![1.0 / n as f64; n * n]];
    let flat = MdeProblem::flat_goe(n).unwrap();
    for z in [Complex64::new(0.3, 0.1), Complex64::new(-1.7, 0.5), Complex64::new(2.5, 0.05)] {
        let blocks = block_mde_solve(&means, &variances, z).unwrap();
        let f = mde_solve(&flat, z).unwrap();
        for (i, b) in blocks.iter().enumerate() {
            assert!((b.get(0, 0) - f.diag[i]).norm() < 1e-10);
        }
    }
}

#[test]
fn mde_density_close_to_semicircle_in_bulk() {
    let d = mde_density(&MdeProblem::flat_goe(8).unwrap(), DensityOptions::default()).unwrap();
    let sc = ReferenceMeasure::semicircle(1.0);
    let worst = (0..=360).map(|k| -1.8 + 0.01 * k as f64).map(|x| (d.measure.density(x) - sc.density(x)).abs()).fold(0.0, f64::max);
    assert!(worst <= 5e-3, "{worst}");
}

#[test]
fn semicircle_plus_semicircle() {
    let sc = ReferenceMeasure::semicircle(1.0);
    let fc = FreeConvolution::new(sc.clone(), sc);
    let target = ReferenceMeasure::semicircle(2f64.sqrt());
    for k in 0..=60 {
        let z = Complex64::new(-3.0 + 0.1 * k as f64, 0.1);
        assert!((fc.stieltjes(z).unwrap() - target.stieltjes(z)).norm() < 1e-6);
    }
}

#[test]
fn free_convolution_with_dirac_shifts() {
    let mu = free_convolve(&ReferenceMeasure::semicircle(1.0), &ReferenceMeasure::dirac(0.7)).unwrap();
    let sc = ReferenceMeasure::semicircle_at(1.0, 0.7);
    for x in [-1.0, 0.0, 0.7, 2.0] {
        assert!((mu.density(x) - sc.density(x)).abs() < 1e-6);
    }
    let both = free_convolve(&ReferenceMeasure::dirac(0.3), &ReferenceMeasure::dirac(0.5)).unwrap();
    assert!(both.cdf(0.8) - both.cdf_left(0.8) >= 0.99);
}

#[test]
fn inversion_of_a_point_mass_concentrates() {
    let p = MdeProblem::new(SymMatrix::zeros(4), vec![0.0; 16]).unwrap();
    let eta = DensityOptions::default().eta0;
    let d = mde_density(&p, DensityOptions::default()).unwrap();
    assert!(d.measure.cdf(10.0 * eta) - d.measure.cdf_left(-10.0 * eta) >= 0.9);
}

#[test]
fn symmetric_mean_gives_symmetric_density() {
    let n = 10;
    let a = SymMatrix::from_diag(&(0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>());
    let p = MdeProblem::new(a, vec![1.0 / n as f64; n * n]).unwrap();
    let d = mde_density(&p, DensityOptions::default()).unwrap();
    let worst = (0..=400).map(|k| 0.0075 * k as f64).map(|x| (d.measure.density(x) - d.measure.density(-x)).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn left_edges() {
    assert_eq!(ReferenceMeasure::semicircle(1.0).left_edge(), -2.0);
    assert!((ReferenceMeasure::marchenko_pastur(0.25).unwrap().left_edge() - 0.25).abs() < 1e-15);
    let d = mde_density(&MdeProblem::flat_goe(8).unwrap(), DensityOptions::default()).unwrap();
    assert!((d.measure.left_edge() + 2.0).abs() <= 0.02, "{}", d.measure.left_edge());
}

#[test]
fn grid_measure_roundtrips_through_json() {
    let (mu, factor) = ReferenceMeasure::grid_from_fn(-2.0, 2.0, 101, |x| (4.0 - x * x).max(0.0).sqrt()).unwrap();
    assert!(factor > 0.0);
    let back: ReferenceMeasure = serde_json::from_str(&serde_json::to_string(&mu).unwrap()).unwrap();
    assert!((back.log_potential(0.3) - mu.log_potential(0.3)).abs() < 1e-14);
    assert!((mu.log_potential(0.0) + 0.5).abs() < 5e-3);
}
