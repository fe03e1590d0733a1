use detlab_web::{free_convolution_density, variational_curve, wigner_histogram};

#[test]
fn histogram_has_unit_mass_inside_window() {
    let h = wigner_histogram(300, "gaussian", 1, 50).unwrap();
    let w = 5.0 / 50.0;
    let mass: f64 = h.chunks(3).map(|c| c[1] * w).sum();
    assert!((mass - 1.0).abs() < 1e-12);
    let sc_mass: f64 = h.chunks(3).map(|c| c[2] * w).sum();
    assert!((sc_mass - 1.0).abs() < 0.01);
}

#[test]
fn free_convolution_density_integrates_to_one() {
    let d = free_convolution_density(1.0, 1.0, 801).unwrap();
    let dx = d[2] - d[0];
    let mass: f64 = d.chunks(2).map(|c| c[1] * dx).sum();
    assert!((mass - 1.0).abs() < 1e-2);
}

#[test]
fn variational_maximizer_at_small_alpha_leaves_bulk() {
    let v = variational_curve(0.125, 4.0, 81).unwrap();
    let (u, s) = (v[v.len() - 2], v[v.len() - 1]);
    assert!((u - 4.0 / 3f64.sqrt()).abs() < 1e-6);
    assert!(v[..v.len() - 2].chunks(2).all(|c| c[1] <= s + 1e-12));
}
