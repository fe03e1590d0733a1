use detlab::ensembles::{sample, sample_dregular_adjacency, sample_haar_orthogonal, EnsembleSpec, EntryDistribution};
use detlab::experiments::mean_stderr;
use detlab::spectral::eigvals_sym;
use detlab::SymMatrix;

#[test]
fn dregular_small_cases() {
    let k4 = sample_dregular_adjacency(4, 3, 1).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(k4.get(i, j), if i == j { 0.0 } else { 1.0 });
        }
    }
    for seed in 0..20 {
        let a = sample_dregular_adjacency(6, 2, seed).unwrap();
        for i in 0..6 {
            assert_eq!(a.get(i, i), 0.0);
            assert_eq!((0..6).map(|j| a.get(i, j)).sum::<f64>(), 2.0);
        }
    }
}

#[test]
fn dregular_bulk_second_moment() {
    // The Perron eigenvalue d/sqrt(d(1-d/N)) carries the excess d/(N-d) of the
    // raw second moment; the remaining N-1 eigenvalues average to exactly 1.
    let (n, d) = (400, 20);
    let eig = eigvals_sym(&sample(&EnsembleSpec::DRegular { n, d, shift: 0.0 }, 3).unwrap()).unwrap();
    let atoms = eig.atoms();
    let raw = eig.moment(2);
    assert!((raw - 1.0 / (1.0 - d as f64 / n as f64)).abs() < 1e-9);
    let bulk = atoms[..n - 1].iter().map(|x| x * x).sum::<f64>() / (n - 1) as f64;
    assert!((0.95..=1.05).contains(&bulk), "{bulk}");
}

#[test]
fn structural_constraints_hold() {
    for seed in 0..5 {
        let er = sample(&EnsembleSpec::ErdosRenyi { n: 30, p: 0.2, shift: 0.0 }, seed).unwrap();
        let vals: Vec<f64> = er.packed().iter().copied().filter(|&v| v != 0.0).collect();
        assert!(vals.windows(2).all(|w| w[0] == w[1]));
        let band = sample(&EnsembleSpec::Band { n: 20, bandwidth: 2, dist: EntryDistribution::gaussian(), shift: 0.0 }, seed).unwrap();
        for i in 0..20usize {
            for j in 0..20usize {
                let dd = i.abs_diff(j);
                if dd.min(20 - dd) > 2 {
                    assert_eq!(band.get(i, j), 0.0);
                }
            }
        }
        let reg = sample_dregular_adjacency(30, 5, seed).unwrap();
        for i in 0..30 {
            assert_eq!((0..30).map(|j| reg.get(i, j)).sum::<f64>(), 5.0);
        }
    }
}

#[test]
fn haar_trace_has_mean_zero() {
    let traces: Vec<f64> = (0..10_000u64)
        .map(|s| {
            let o = sample_haar_orthogonal(50, s).unwrap();
            (0..50).map(|i| o.get(i, i)).sum()
        })
        .collect();
    let (m, se) = mean_stderr(&traces);
    assert!(m.abs() <= 3.0 * se, "{m} ± {se}");
    // Tr(O) has variance 1 under Haar measure.
    assert!((se * 100.0 - 1.0).abs() < 0.05);
}

#[test]
fn haar_is_orthogonal() {
    let o = sample_haar_orthogonal(12, 4).unwrap();
    let g = o.transpose().matmul(&o);
    for i in 0..12 {
        for j in 0..12 {
            assert!((g.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
}

#[test]
fn specs_roundtrip_through_json_and_toml() {
    let specs = vec![
        EnsembleSpec::wigner(10, EntryDistribution::student_t(5.0), 0.5),
        EnsembleSpec::DRegular { n: 10, d: 3, shift: 0.0 },
        EnsembleSpec::Covariance { rows: 3, cols: 6, dist: EntryDistribution::rademacher(), shift: 0.0 },
        EnsembleSpec::VarianceProfile { mean: SymMatrix::from_diag(&[1.0, 2.0]), variances: vec![vec![1.0, 0.5], vec![0.5, 0.0]] },
        EnsembleSpec::LongRangeShift { base: Box::new(EnsembleSpec::goe(5)), shift_std: 0.3 },
    ];
    for spec in specs {
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&json).unwrap(), spec);
        let text = toml::to_string(&spec).unwrap();
        assert_eq!(toml::from_str::<EnsembleSpec>(&text).unwrap(), spec);
        assert_eq!(spec.hash(), spec.clone().hash());
    }
    let parsed: EnsembleSpec = toml::from_str("model = \"wigner\"\nn = 4\ndist = { kind = \"pareto\", tail_index = 1.5 }\n").unwrap();
    assert_eq!(parsed, EnsembleSpec::wigner(4, EntryDistribution::pareto(1.5), 0.0));
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(EnsembleSpec::DRegular { n: 5, d: 3, shift: 0.0 }.validate().is_err());
    assert!(EnsembleSpec::ErdosRenyi { n: 5, p: 1.0, shift: 0.0 }.validate().is_err());
    assert!(EnsembleSpec::Band { n: 10, bandwidth: 6, dist: EntryDistribution::gaussian(), shift: 0.0 }.validate().is_err());
    assert!(EnsembleSpec::wigner(0, EntryDistribution::gaussian(), 0.0).validate().is_err());
    assert!(sample(&EnsembleSpec::wigner(3, EntryDistribution::pareto(-1.0), 0.0), 1).is_err());
}

#[test]
fn same_seed_same_matrix() {
    let spec = EnsembleSpec::FreeAddition { a_diag: vec![1.0, -1.0, 0.5], b_diag: vec![0.0, 2.0, 1.0], shift: 0.0 };
    assert_eq!(sample(&spec, 11).unwrap(), sample(&spec, 11).unwrap());
    assert_ne!(sample(&spec, 11).unwrap(), sample(&spec, 12).unwrap());
}
