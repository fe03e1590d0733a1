use detlab::ensembles::EnsembleSpec;
use detlab::reference::semicircle;
use detlab::variational::*;
use detlab::{Error, ReferenceMeasure};

fn proto(alpha: f64, domain: Domain) -> VarProblem {
    VarProblem::new(MeasureFamily::shifted_semicircle(), alpha, domain).unwrap()
}

/// `max_u Φ(u) - αu²` on a fine grid of `[lo, hi]`.
fn grid_oracle(alpha: f64, lo: f64, hi: f64) -> (f64, f64) {
    let sc = semicircle(1.0);
    (0..=200_000)
        .map(|k| {
            let u = lo + (hi - lo) * k as f64 / 200_000.0;
            (u, sc.log_potential(-u) - alpha * u * u)
        })
        .fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

#[test]
fn s_alpha_examples() {
    let p = proto(0.5, Domain::whole());
    assert!((s_alpha(&p, &[1.0]).unwrap() + 0.75).abs() < 1e-9);
    let q = proto(3.0, Domain::whole());
    assert!((s_alpha(&p, &[0.0]).unwrap() - s_alpha(&q, &[0.0]).unwrap()).abs() < 1e-15);
}

#[test]
fn unrestricted_matches_grid_oracle() {
    let half = solve_unrestricted(&proto(0.5, Domain::whole())).unwrap();
    assert!(half.u[0].abs() < 1e-6 && (half.value + 0.5).abs() < 1e-6, "{half:?}");

    let eighth = solve_unrestricted(&proto(0.125, Domain::whole())).unwrap();
    let (u, v) = grid_oracle(0.125, 0.0, 4.0);
    assert!((eighth.value - v).abs() < 1e-6, "{} vs {v}", eighth.value);
    assert!((eighth.u[0].abs() - u).abs() < 1e-3);
    // Closed form: the maximizer of log-potential minus u²/8 outside the bulk sits at 4/√3.
    assert!((eighth.u[0].abs() - 4.0 / 3f64.sqrt()).abs() < 1e-6);
}

#[test]
fn singleton_domain_evaluates_the_point() {
    let p = proto(0.25, Domain::point(&[3.0]));
    let s = solve_unrestricted(&p).unwrap();
    assert_eq!(s.u, vec![3.0]);
    assert!((s.value - s_alpha(&p, &[3.0]).unwrap()).abs() < 1e-15);
}

#[test]
fn membership_examples() {
    let p = proto(0.5, Domain::whole());
    assert_eq!(good_set_membership(&p, &[2.0], 0.1).unwrap().class, GoodSetClass::InG);
    assert_eq!(good_set_membership(&p, &[2.2], 0.1).unwrap().class, GoodSetClass::InGPlusEps);
    let m = good_set_membership(&p, &[0.0], 0.1).unwrap();
    assert_eq!(m.class, GoodSetClass::Outside);
    assert!((m.mass_below - semicircle(1.0).cdf(-0.1)).abs() < 1e-9);
    assert!(good_set_membership(&p, &[0.0], 0.0).is_err());
}

#[test]
fn restricted_small_alpha_leaves_the_edge() {
    let r = solve_restricted(&proto(0.01, Domain::whole())).unwrap();
    let (u, v) = grid_oracle(0.01, 2.0, 20.0);
    assert!(u > 2.0);
    assert!((r.solution.value - v).abs() < 1e-6);
    assert!((r.solution.u[0] - u).abs() < 1e-3);
    assert!(r.is_monotone(1e-9));
}

#[test]
fn restricted_large_alpha_sits_on_the_edge() {
    let r = solve_restricted(&proto(10.0, Domain::whole())).unwrap();
    assert!((r.solution.u[0] - 2.0).abs() < 1e-6, "{:?}", r.solution);
    assert!(r.is_monotone(1e-9));
}

#[test]
fn restricted_on_a_ray_inside_the_good_set() {
    let p = proto(0.01, Domain::interval(Some(5.0), None));
    let r = solve_restricted(&p).unwrap();
    let u = solve_unrestricted(&p).unwrap();
    assert!(r.solution.u[0] >= 5.0);
    assert!((r.solution.value - u.value).abs() < 1e-9);
}

#[test]
fn empty_good_set_is_reported() {
    let p = proto(0.5, Domain::interval(None, Some(1.0)));
    assert!(matches!(solve_restricted(&p), Err(Error::EmptyGoodSet)));
}

#[test]
fn non_decaying_family_is_rejected() {
    // An atom at e^{u²} keeps pace with the penalty until f64 runs out, which
    // pushes the envelope crossing past the search cap for tiny α.
    let fam = MeasureFamily::custom("far", 1, |u| Ok(ReferenceMeasure::dirac((u[0] * u[0]).min(700.0).exp())));
    let p = VarProblem::new(fam, 1e-10, Domain::whole()).unwrap();
    assert!(matches!(solve_unrestricted(&p), Err(Error::UnboundedDomainNoDecay(_))));
}

#[test]
fn family_measures_have_unit_mass_and_vary_continuously() {
    let fam = MeasureFamily::shifted_semicircle();
    for u in [-3.0, 0.0, 1.5] {
        assert!((fam.mass(&[u]).unwrap() - 1.0).abs() < 1e-12);
        let d = fam.continuity_probe(&[u], 0, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(d.windows(2).all(|w| w[1] <= w[0]) && d[2] < 1e-2);
    }
}

#[test]
fn laplace_agrees_with_the_supremum() {
    let p = proto(0.5, Domain::whole());
    let grid: Vec<f64> = (0..=400).map(|k| -4.0 + 8.0 * k as f64 / 400.0).collect();
    let r = laplace_crosscheck(&p, |u| EnsembleSpec::goe(100).with_shift(-u), &grid, 20, 3, 0.08).unwrap();
    assert!(r.unrestricted.passed, "{:?}", r.unrestricted);
    assert_eq!(r.rows.len(), grid.len());
    assert!(laplace_crosscheck(&p, |u| EnsembleSpec::goe(10).with_shift(-u), &[0.0, 1.0], 4, 3, 0.1).is_err());
}
