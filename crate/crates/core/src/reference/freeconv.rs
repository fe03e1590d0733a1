//! Free additive convolution by subordination.
//!
//! With Cauchy transforms `G = -m`, reciprocals `F = 1/G` and `h = F - id`,
//! the subordination function `ω₁` is the unique fixed point in the upper
//! half plane of `w ↦ z + h_B(z + h_A(w))`. Then `ω₂ = z + h_A(ω₁)` and
//! `G_{A⊞B}(z) = G_A(ω₁) = G_B(ω₂)`, `ω₁ + ω₂ = z + F_{A⊞B}(z)`.

use num_complex::Complex64;

use super::mde::{sweep, DensityOptions};
use super::{inversion_edge_threshold, ReferenceMeasure};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 50_000;
/// Accepted subordination residual.
pub const SUBORDINATION_TOL: f64 = 1e-8;

/// Subordination data at one spectral parameter.
#[derive(Clone, Copy, Debug)]
pub struct Subordination {
    pub z: Complex64,
    pub omega1: Complex64,
    pub omega2: Complex64,
    /// Stieltjes transform `m(z) = ∫ dμ/(λ - z)` of the convolution.
    pub m: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

/// `μ_A ⊞ μ_B` evaluated lazily through subordination.
#[derive(Clone, Debug)]
pub struct FreeConvolution {
    a: ReferenceMeasure,
    b: ReferenceMeasure,
}

impl FreeConvolution {
    pub fn new(a: ReferenceMeasure, b: ReferenceMeasure) -> Self {
        Self { a, b }
    }

    fn g(mu: &ReferenceMeasure, w: Complex64) -> Complex64 {
        -mu.stieltjes(w)
    }

    fn h(mu: &ReferenceMeasure, w: Complex64) -> Complex64 {
        Self::g(mu, w).inv() - w
    }

    fn fixed_map(&self, z: Complex64, w: Complex64) -> Complex64 {
        z + Self::h(&self.b, z + Self::h(&self.a, w))
    }

    pub fn subordination(&self, z: Complex64) -> Result<Subordination> {
        self.subordination_from(z, None)
    }

    /// Solves for `ω₁` from `init` (or `z`), mixing Newton steps with a
    /// finite-difference derivative and plain fixed-point steps.
    pub fn subordination_from(&self, z: Complex64, init: Option<Complex64>) -> Result<Subordination> {
        if !(z.im > 0.0) {
            return Err(Error::param("free convolution needs Im z > 0"));
        }
        let mut w = match init {
            Some(w) if w.im >= z.im && w.is_finite() => w,
            _ => z,
        };
        let mut tw = self.fixed_map(z, w);
        let mut r = (tw - w).norm();
        let mut iterations = 0;
        while iterations < MAX_ITERATIONS {
            let scale = 1.0 + w.norm();
            if r <= 1e-15 * scale {
                break;
            }
            iterations += 1;
            let step = Complex64::new(1e-7 * scale, 0.0);
            let gw = tw - w;
            let gd = (self.fixed_map(z, w + step) - (w + step)) - gw;
            let mut accepted = false;
            if gd.norm() > 0.0 {
                let wn = w - gw * step / gd;
                if wn.is_finite() && wn.im >= z.im {
                    let tn = self.fixed_map(z, wn);
                    let rn = (tn - wn).norm();
                    if rn < r {
                        w = wn;
                        tw = tn;
                        r = rn;
                        accepted = true;
                    }
                }
            }
            if !accepted {
                let tn = self.fixed_map(z, tw);
                let rn = (tn - tw).norm();
                if rn >= r && r < 1e-12 * scale {
                    break;
                }
                w = tw;
                tw = tn;
                r = rn;
            }
        }
        let omega1 = w;
        let omega2 = z + Self::h(&self.a, omega1);
        let ga = Self::g(&self.a, omega1);
        let gb = Self::g(&self.b, omega2);
        let residual = (ga - gb).norm().max((omega1 + omega2 - z - ga.inv()).norm());
        if !(residual <= SUBORDINATION_TOL) {
            return Err(Error::NoConvergence { what: "subordination fixed point", iterations });
        }
        let m = -ga;
        if !(m.im > 0.0) {
            return Err(Error::ImViolation("free convolution"));
        }
        Ok(Subordination { z, omega1, omega2, m, residual, iterations })
    }

    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.subordination(z)?.m)
    }

    /// Default grid span: one unit beyond `[ℓ_A + ℓ_B, r_A + r_B]`.
    pub fn default_range(&self) -> (f64, f64) {
        (self.a.left_edge() + self.b.left_edge() - 1.0, self.a.right_edge() + self.b.right_edge() + 1.0)
    }

    /// Density `Im m(x + iη₀)/π` on a grid, renormalized to unit mass.
    /// Returns the measure and the renormalization factor.
    pub fn density(&self, opts: DensityOptions) -> Result<(ReferenceMeasure, f64)> {
        if !(opts.eta0 > 0.0) || opts.points < 2 {
            return Err(Error::param("density extraction needs eta0 > 0 and at least two points"));
        }
        let (lo, hi) = opts.range.unwrap_or_else(|| self.default_range());
        let h = (hi - lo) / (opts.points - 1) as f64;
        let xs: Vec<f64> = (0..opts.points).map(|k| lo + h * k as f64).collect();
        let dens = sweep(&xs, |x, warm: Option<&Complex64>| {
            let s = self.subordination_from(Complex64::new(x, opts.eta0), warm.copied())?;
            Ok(((s.m.im / std::f64::consts::PI).max(0.0), s.omega1))
        })?;
        ReferenceMeasure::grid_with_threshold(lo, hi, dens, inversion_edge_threshold(opts.eta0))
    }
}

/// `μ_A ⊞ μ_B` as a grid measure with default options. Convolving with a
/// point mass is a translation and is done exactly.
pub fn free_convolve(a: &ReferenceMeasure, b: &ReferenceMeasure) -> Result<ReferenceMeasure> {
    if let [c] = b.atoms() {
        return Ok(a.shifted(*c));
    }
    if let [c] = a.atoms() {
        return Ok(b.shifted(*c));
    }
    Ok(FreeConvolution::new(a.clone(), b.clone()).density(DensityOptions::default())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircles_add_in_variance() {
        let sc = ReferenceMeasure::semicircle(1.0);
        let fc = FreeConvolution::new(sc.clone(), sc);
        let target = ReferenceMeasure::semicircle(2f64.sqrt());
        for k in 0..=16 {
            let z = Complex64::new(-4.0 + 0.5 * k as f64, 0.1);
            let m = fc.stieltjes(z).unwrap();
            assert!((m - target.stieltjes(z)).norm() < 1e-9, "z={z}");
        }
    }

    #[test]
    fn dirac_shifts() {
        let sc = ReferenceMeasure::semicircle(1.0);
        let fc = FreeConvolution::new(sc.clone(), ReferenceMeasure::dirac(0.7));
        let z = Complex64::new(0.2, 0.05);
        let m = fc.stieltjes(z).unwrap();
        assert!((m - sc.shifted(0.7).stieltjes(z)).norm() < 1e-12);
    }
}
