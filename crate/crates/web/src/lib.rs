//! Browser bindings for three small demos: a sampled Wigner spectrum against
//! the semicircle, the density of a free additive convolution, and the
//! variational curve `u ↦ S_α[u]` for a shifted semicircle.
//!
//! Every export returns a flat `Float64Array` so the page needs no glue beyond
//! the generated bindings.

use detlab::ensembles::sample;
use detlab::reference::{DensityOptions, FreeConvolution};
use detlab::spectral::eigenvalues;
use detlab::variational::{s_alpha, solve_unrestricted, Domain, MeasureFamily, VarProblem};
use detlab::{EnsembleSpec, EntryDistribution, ReferenceMeasure};
use wasm_bindgen::prelude::*;

fn js_err(e: detlab::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Histogram of a Wigner spectrum on `[-2.5, 2.5]`, followed by the semicircle
/// density at the bin centres: `[centre_0, hist_0, sc_0, centre_1, …]`.
pub fn wigner_histogram(n: usize, dist: &str, seed: u64, bins: usize) -> detlab::Result<Vec<f64>> {
    let d: EntryDistribution = dist.parse()?;
    let h = sample(&EnsembleSpec::wigner(n, d, 0.0), seed)?;
    let eig = eigenvalues(&h)?;
    let (lo, hi) = (-2.5, 2.5);
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for l in eig {
        let k = ((l - lo) / w).floor();
        if k >= 0.0 && (k as usize) < bins {
            counts[k as usize] += 1;
        }
    }
    let sc = ReferenceMeasure::semicircle(1.0);
    let mut out = Vec::with_capacity(3 * bins);
    for (k, c) in counts.iter().enumerate() {
        let x = lo + (k as f64 + 0.5) * w;
        out.extend([x, *c as f64 / (n as f64 * w), sc.density(x)]);
    }
    Ok(out)
}

/// Density of `sc(σ) ⊞ (½δ_{-a} + ½δ_a)` as `[x_0, ρ_0, x_1, ρ_1, …]`.
pub fn free_convolution_density(sigma: f64, a: f64, points: usize) -> detlab::Result<Vec<f64>> {
    let atoms = ReferenceMeasure::atomic(vec![-a, a], vec![1.0, 1.0])?;
    let fc = FreeConvolution::new(ReferenceMeasure::semicircle(sigma), atoms);
    let (mu, _) = fc.density(DensityOptions { points, ..DensityOptions::default() })?;
    let (lo, hi) = (mu.left_edge() - 0.5, mu.right_edge() + 0.5);
    let mut out = Vec::with_capacity(2 * points);
    for k in 0..points {
        let x = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        out.extend([x, mu.density(x)]);
    }
    Ok(out)
}

/// `S_α[u]` for the shifted semicircle on `[-u_max, u_max]` as
/// `[u_0, S_0, …]`, followed by the maximizer and its value.
pub fn variational_curve(alpha: f64, u_max: f64, points: usize) -> detlab::Result<Vec<f64>> {
    let prob = VarProblem::new(MeasureFamily::shifted_semicircle(), alpha, Domain::whole())?;
    let mut out = Vec::with_capacity(2 * points + 2);
    for k in 0..points {
        let u = -u_max + 2.0 * u_max * k as f64 / (points - 1) as f64;
        out.extend([u, s_alpha(&prob, &[u])?]);
    }
    let sol = solve_unrestricted(&prob)?;
    out.extend([sol.u[0].abs(), sol.value]);
    Ok(out)
}

#[wasm_bindgen(js_name = wignerHistogram)]
pub fn wigner_histogram_js(n: usize, dist: &str, seed: u64, bins: usize) -> Result<Vec<f64>, JsError> {
    wigner_histogram(n, dist, seed, bins).map_err(js_err)
}

#[wasm_bindgen(js_name = freeConvolutionDensity)]
pub fn free_convolution_density_js(sigma: f64, a: f64, points: usize) -> Result<Vec<f64>, JsError> {
    free_convolution_density(sigma, a, points).map_err(js_err)
}

#[wasm_bindgen(js_name = variationalCurve)]
pub fn variational_curve_js(alpha: f64, u_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    variational_curve(alpha, u_max, points).map_err(js_err)
}
