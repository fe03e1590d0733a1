use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quad;
use crate::error::{Error, Result};

/// Density threshold, relative to the maximum, that defines a grid edge.
pub const GRID_EDGE_THRESHOLD: f64 = 1e-4;

/// Edge threshold for a density recovered by Stieltjes inversion at height
/// `η₀`. The Cauchy tail of width `η₀` decays like `η₀ / √d` next to a square
/// root edge, which stays above `1e-4 · max` across the whole grid padding.
pub fn inversion_edge_threshold(eta0: f64) -> f64 {
    GRID_EDGE_THRESHOLD.max(10.0 * eta0).min(0.5)
}

fn default_edge_threshold() -> f64 {
    GRID_EDGE_THRESHOLD
}

/// How a reference measure is stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Representation {
    /// `√(4σ² - (x-c)²) / (2πσ²)` on `[c - 2σ, c + 2σ]`.
    Semicircle { sigma: f64, center: f64 },
    /// Marčenko–Pastur law with ratio `γ ∈ (0, 1]`, translated by `shift`.
    MarchenkoPastur {
        gamma: f64,
        #[serde(default)]
        shift: f64,
    },
    /// Piecewise-linear density on a uniform grid spanning `[left, right]`.
    Grid {
        left: f64,
        right: f64,
        density: Vec<f64>,
        /// Relative density level that defines the edges.
        #[serde(default = "default_edge_threshold")]
        edge_threshold: f64,
    },
    /// Finite combination of point masses.
    Atomic { atoms: Vec<f64>, weights: Vec<f64> },
}

/// A deterministic probability measure on the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Representation", into = "Representation")]
pub struct ReferenceMeasure {
    repr: Representation,
    left_edge: f64,
    right_edge: f64,
    /// Cumulative mass at each grid node (grids only).
    cum: Vec<f64>,
}

impl TryFrom<Representation> for ReferenceMeasure {
    type Error = Error;

    fn try_from(r: Representation) -> Result<Self> {
        match r {
            Representation::Semicircle { sigma, center } => {
                if !(sigma > 0.0) {
                    return Err(Error::param(format!("semicircle scale must be positive, got {sigma}")));
                }
                Ok(Self::semicircle_at(sigma, center))
            }
            Representation::MarchenkoPastur { gamma, shift } => Ok(Self::marchenko_pastur(gamma)?.shifted(shift)),
            Representation::Grid { left, right, density, edge_threshold } => {
                Ok(Self::grid_with_threshold(left, right, density, edge_threshold)?.0)
            }
            Representation::Atomic { atoms, weights } => Self::atomic(atoms, weights),
        }
    }
}

impl From<ReferenceMeasure> for Representation {
    fn from(m: ReferenceMeasure) -> Self {
        m.repr
    }
}

/// Standard semicircle Stieltjes transform, the root of `m² + ζm + 1` in the
/// upper half plane.
fn semicircle_m(zeta: Complex64) -> Complex64 {
    let m = 0.5 * (-zeta + (zeta - 2.0).sqrt() * (zeta + 2.0).sqrt());
    if m.im < 0.0 {
        // Lower half plane ζ: pick the reflected branch.
        1.0 / m
    } else {
        m
    }
}

/// `log(1 + w) - w` with a series for small `|w|`.
fn log1p_minus(w: Complex64) -> Complex64 {
    if w.norm() < 0.1 {
        let mut term = w;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 2..30 {
            term *= -w;
            sum += term / k as f64;
            if term.norm() < 1e-18 {
                break;
            }
        }
        // term_k = (-1)^{k-1} w^k
        sum
    } else {
        (1.0 + w).ln() - w
    }
}

impl ReferenceMeasure {
    pub fn semicircle(sigma: f64) -> Self {
        Self::semicircle_at(sigma, 0.0)
    }

    pub fn semicircle_at(sigma: f64, center: f64) -> Self {
        Self {
            repr: Representation::Semicircle { sigma, center },
            left_edge: center - 2.0 * sigma,
            right_edge: center + 2.0 * sigma,
            cum: Vec::new(),
        }
    }

    pub fn marchenko_pastur(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::param(format!("Marchenko-Pastur ratio must lie in (0, 1], got {gamma}")));
        }
        let s = gamma.sqrt();
        Ok(Self {
            repr: Representation::MarchenkoPastur { gamma, shift: 0.0 },
            left_edge: (1.0 - s).powi(2),
            right_edge: (1.0 + s).powi(2),
            cum: Vec::new(),
        })
    }

    /// Builds a grid measure, renormalizing to unit mass. Returns the factor
    /// the density was multiplied by.
    pub fn grid(left: f64, right: f64, density: Vec<f64>) -> Result<(Self, f64)> {
        Self::grid_with_threshold(left, right, density, GRID_EDGE_THRESHOLD)
    }

    /// [`ReferenceMeasure::grid`] with edges where the density first and last
    /// exceeds `edge_threshold` times its maximum.
    pub fn grid_with_threshold(left: f64, right: f64, mut density: Vec<f64>, edge_threshold: f64) -> Result<(Self, f64)> {
        if !(0.0..1.0).contains(&edge_threshold) {
            return Err(Error::param("edge threshold must lie in [0, 1)"));
        }
        if density.len() < 2 || !(right > left) {
            return Err(Error::param("grid needs at least two nodes and left < right"));
        }
        if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::param("grid density must be finite and nonnegative"));
        }
        let h = (right - left) / (density.len() - 1) as f64;
        let mass: f64 = density.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
        if !(mass > 0.0) {
            return Err(Error::param("grid density has zero mass"));
        }
        let factor = 1.0 / mass;
        for d in density.iter_mut() {
            *d *= factor;
        }
        let mut cum = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            cum.push(acc);
        }
        let max = density.iter().cloned().fold(0.0, f64::max);
        let thr = edge_threshold * max;
        let first = density.iter().position(|&d| d > thr).unwrap_or(0);
        let last = density.iter().rposition(|&d| d > thr).unwrap_or(density.len() - 1);
        Ok((
            Self {
                left_edge: left + h * first as f64,
                right_edge: left + h * last as f64,
                repr: Representation::Grid { left, right, density, edge_threshold },
                cum,
            },
            factor,
        ))
    }

    /// Samples `density` on `points` uniform nodes over `[left, right]`.
    pub fn grid_from_fn(left: f64, right: f64, points: usize, density: impl Fn(f64) -> f64) -> Result<(Self, f64)> {
        let h = (right - left) / (points.max(2) - 1) as f64;
        Self::grid(left, right, (0..points.max(2)).map(|k| density(left + h * k as f64)).collect())
    }

    pub fn atomic(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::param("atomic measure needs matching nonempty atoms and weights"));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || !(total > 0.0) {
            return Err(Error::param("atomic weights must be nonnegative with positive sum"));
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights.into_iter().map(|w| w / total)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (atoms, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        Ok(Self {
            left_edge: atoms[0],
            right_edge: atoms[atoms.len() - 1],
            repr: Representation::Atomic { atoms, weights },
            cum: Vec::new(),
        })
    }

    pub fn dirac(x: f64) -> Self {
        Self::atomic(vec![x], vec![1.0]).expect("single atom")
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn left_edge(&self) -> f64 {
        self.left_edge
    }

    pub fn right_edge(&self) -> f64 {
        self.right_edge
    }

    /// Span of the stored data: the grid extent for grids, the support otherwise.
    pub fn span(&self) -> (f64, f64) {
        match &self.repr {
            Representation::Grid { left, right, .. } => (*left, *right),
            _ => (self.left_edge, self.right_edge),
        }
    }

    /// Locations of point masses (empty unless atomic).
    pub fn atoms(&self) -> &[f64] {
        match &self.repr {
            Representation::Atomic { atoms, .. } => atoms,
            _ => &[],
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.repr, Representation::Atomic { .. })
    }

    /// Translate by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.left_edge += c;
        out.right_edge += c;
        match &mut out.repr {
            Representation::Semicircle { center, .. } => *center += c,
            Representation::MarchenkoPastur { shift, .. } => *shift += c,
            Representation::Grid { left, right, .. } => {
                *left += c;
                *right += c;
            }
            Representation::Atomic { atoms, .. } => atoms.iter_mut().for_each(|a| *a += c),
        }
        out
    }

    /// Lebesgue density; zero for atomic measures.
    pub fn density(&self, x: f64) -> f64 {
        match &self.repr {
            Representation::Semicircle { sigma, center } => {
                let u = (x - center) / sigma;
                if u.abs() >= 2.0 {
                    0.0
                } else {
                    (4.0 - u * u).sqrt() / (2.0 * PI * sigma)
                }
            }
            Representation::MarchenkoPastur { gamma, shift } => {
                let y = x - shift;
                let (a, b) = ((1.0 - gamma.sqrt()).powi(2), (1.0 + gamma.sqrt()).powi(2));
                if y <= a || y >= b || y <= 0.0 {
                    0.0
                } else {
                    ((b - y) * (y - a)).sqrt() / (2.0 * PI * gamma * y)
                }
            }
            Representation::Grid { left, right, density, .. } => {
                if x < *left || x > *right {
                    return 0.0;
                }
                let h = (right - left) / (density.len() - 1) as f64;
                let t = (x - left) / h;
                let k = (t.floor() as usize).min(density.len() - 2);
                let f = t - k as f64;
                density[k] * (1.0 - f) + density[k + 1] * f
            }
            Representation::Atomic { .. } => 0.0,
        }
    }

    /// `μ((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.repr {
            Representation::Semicircle { sigma, center } => {
                let u = ((x - center) / sigma).clamp(-2.0, 2.0);
                (0.5 + u * (4.0 - u * u).sqrt() / (4.0 * PI) + (u / 2.0).asin() / PI).clamp(0.0, 1.0)
            }
            Representation::MarchenkoPastur { gamma, shift } => {
                let (a, b) = ((1.0 - gamma.sqrt()).powi(2), (1.0 + gamma.sqrt()).powi(2));
                let y = x - shift;
                if y <= a {
                    return 0.0;
                }
                if y >= b {
                    return 1.0;
                }
                // y = m - r cos θ turns the square-root edges into sin² θ.
                let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
                let theta = ((m - y) / r).clamp(-1.0, 1.0).acos();
                let g = *gamma;
                let f = |t: f64| {
                    let s = t.sin();
                    r * r * s * s / (2.0 * PI * g * (m - r * t.cos()))
                };
                quad::fixed(quad::gl64(), &f, 0.0, theta).clamp(0.0, 1.0)
            }
            Representation::Grid { left, right, density, .. } => {
                if x <= *left {
                    return 0.0;
                }
                if x >= *right {
                    return 1.0;
                }
                let h = (right - left) / (density.len() - 1) as f64;
                let t = (x - left) / h;
                let k = (t.floor() as usize).min(density.len() - 2);
                let u = x - (left + h * k as f64);
                let s = (density[k + 1] - density[k]) / h;
                (self.cum[k] + density[k] * u + 0.5 * s * u * u).min(1.0)
            }
            Representation::Atomic { atoms, weights } => {
                let k = atoms.partition_point(|&a| a <= x);
                weights[..k].iter().sum::<f64>().min(1.0)
            }
        }
    }

    /// `μ((-∞, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match &self.repr {
            Representation::Atomic { atoms, weights } => {
                let k = atoms.partition_point(|&a| a < x);
                weights[..k].iter().sum::<f64>().min(1.0)
            }
            _ => self.cdf(x),
        }
    }

    /// Generalized inverse `inf{x : F(x) >= t}` by bisection.
    pub fn quantile(&self, t: f64) -> f64 {
        let (mut lo, mut hi) = self.span();
        if t <= 0.0 {
            return self.left_edge;
        }
        if t >= 1.0 {
            return self.right_edge;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        match &self.repr {
            Representation::Grid { left, right, density, .. } => {
                let h = (right - left) / (density.len() - 1) as f64;
                const NODES: [f64; 3] = [0.112_701_665_379_258_3, 0.5, 0.887_298_334_620_741_7];
                const WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
                let terms: Vec<f64> = density
                    .windows(2)
                    .enumerate()
                    .map(|(k, w)| {
                        let x0 = left + h * k as f64;
                        NODES
                            .iter()
                            .zip(WEIGHTS)
                            .map(|(t, wt)| wt * f(x0 + t * h) * (w[0] * (1.0 - t) + w[1] * t))
                            .sum::<f64>()
                            * h
                    })
                    .collect();
                crate::par::pairwise_sum(&terms)
            }
            Representation::Atomic { atoms, weights } => atoms.iter().zip(weights).map(|(a, w)| w * f(*a)).sum(),
            _ => {
                let g = |x: f64| f(x) * self.density(x);
                quad::graded(&g, self.left_edge, self.right_edge, &[]).0
            }
        }
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// Stieltjes transform `∫ μ(dλ) / (λ - z)` for `Im z > 0`.
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        match &self.repr {
            Representation::Semicircle { sigma, center } => semicircle_m((z - center) / sigma) / sigma,
            Representation::MarchenkoPastur { gamma, shift } => {
                let w = z - shift;
                let g = *gamma;
                // γ w m² + (w + γ - 1) m + 1 = 0
                let (qa, qb) = (g * w, w + g - 1.0);
                let disc = (qb * qb - 4.0 * qa).sqrt();
                let r1 = (-qb + disc) / (2.0 * qa);
                let r2 = (-qb - disc) / (2.0 * qa);
                let ok = |m: Complex64| m.im > 0.0 && (w * m).im >= -1e-14 * (w * m).norm();
                match (ok(r1), ok(r2)) {
                    (true, false) => r1,
                    (false, true) => r2,
                    _ => {
                        if r1.im >= r2.im {
                            r1
                        } else {
                            r2
                        }
                    }
                }
            }
            Representation::Grid { left, right, density, .. } => {
                let h = (right - left) / (density.len() - 1) as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, w) in density.windows(2).enumerate() {
                    if w[0] == 0.0 && w[1] == 0.0 {
                        continue;
                    }
                    let x0 = left + h * k as f64;
                    let s = (w[1] - w[0]) / h;
                    let d0 = x0 - z;
                    let ww = h / d0;
                    let beta = w[0] + s * (z - x0);
                    acc += w[0] * ww + beta * log1p_minus(ww);
                }
                acc
            }
            Representation::Atomic { atoms, weights } => {
                atoms.iter().zip(weights).map(|(a, w)| *w / (a - z)).sum()
            }
        }
    }

    /// Log-potential `∫ log|λ - E| μ(dλ)`; `-inf` when it diverges.
    pub fn log_potential(&self, e: f64) -> f64 {
        match &self.repr {
            Representation::Grid { left, right, density, .. } => {
                let h = (right - left) / (density.len() - 1) as f64;
                let ulogu = |u: f64| if u == 0.0 { 0.0 } else { u * u.abs().ln() };
                // ∫ log|u| (α + s u) du = α(u log|u| - u) + s(u² log|u| / 2 - u² / 4)
                let anti = |u: f64, alpha: f64, s: f64| alpha * (ulogu(u) - u) + s * (u * ulogu(u) / 2.0 - u * u / 4.0);
                let terms: Vec<f64> = density
                    .windows(2)
                    .enumerate()
                    .map(|(k, w)| {
                        if w[0] == 0.0 && w[1] == 0.0 {
                            return 0.0;
                        }
                        let x0 = left + h * k as f64;
                        let s = (w[1] - w[0]) / h;
                        let alpha = w[0] + s * (e - x0);
                        anti(x0 + h - e, alpha, s) - anti(x0 - e, alpha, s)
                    })
                    .collect();
                crate::par::pairwise_sum(&terms)
            }
            Representation::Atomic { atoms, weights } => {
                atoms.iter().zip(weights).map(|(a, w)| if *w == 0.0 { 0.0 } else { w * (a - e).abs().ln() }).sum()
            }
            _ => {
                let g = |x: f64| (x - e).abs().ln() * self.density(x);
                quad::graded(&g, self.left_edge, self.right_edge, &[e]).0
            }
        }
    }

    /// Like [`log_potential`](Self::log_potential) but reports divergence as an error.
    pub fn try_log_potential(&self, e: f64) -> Result<f64> {
        let v = self.log_potential(e);
        if v == f64::NEG_INFINITY || v.is_nan() {
            Err(Error::DivergentIntegral(e))
        } else {
            Ok(v)
        }
    }

    /// Writes `(x, density)` rows for grids, `(x, mass)` rows for atoms, and a
    /// sampled density on 1001 points otherwise.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        match &self.repr {
            Representation::Atomic { atoms, weights } => {
                wr.write_record(["x", "mass"])?;
                for (a, m) in atoms.iter().zip(weights) {
                    wr.write_record([format!("{a:.12e}"), format!("{m:.12e}")])?;
                }
            }
            Representation::Grid { left, right, density, .. } => {
                wr.write_record(["x", "density"])?;
                let h = (right - left) / (density.len() - 1) as f64;
                for (k, d) in density.iter().enumerate() {
                    wr.write_record([format!("{:.12e}", left + h * k as f64), format!("{d:.12e}")])?;
                }
            }
            _ => {
                wr.write_record(["x", "density"])?;
                let (l, r) = self.span();
                for k in 0..1001 {
                    let x = l + (r - l) * k as f64 / 1000.0;
                    wr.write_record([format!("{x:.12e}"), format!("{:.12e}", self.density(x))])?;
                }
            }
        }
        wr.flush()?;
        Ok(())
    }
}
