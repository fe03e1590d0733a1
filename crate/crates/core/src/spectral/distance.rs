//! Distances between probability measures on the line.

use crate::reference::ReferenceMeasure;
use crate::spectral::EmpiricalMeasure;

/// Number of uniform sample points used whenever a continuous CDF is involved.
const CONTINUOUS_GRID: usize = 20_001;

/// Either kind of measure accepted by the distance functions.
#[derive(Clone, Copy, Debug)]
pub enum Measure<'a> {
    Empirical(&'a EmpiricalMeasure),
    Reference(&'a ReferenceMeasure),
}

impl<'a> From<&'a EmpiricalMeasure> for Measure<'a> {
    fn from(m: &'a EmpiricalMeasure) -> Self {
        Measure::Empirical(m)
    }
}

impl<'a> From<&'a ReferenceMeasure> for Measure<'a> {
    fn from(m: &'a ReferenceMeasure) -> Self {
        Measure::Reference(m)
    }
}

impl Measure<'_> {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            Measure::Empirical(m) => m.cdf(x),
            Measure::Reference(r) => r.cdf(x),
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        match self {
            Measure::Empirical(m) => m.cdf_left(x),
            Measure::Reference(r) => r.cdf_left(x),
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            Measure::Empirical(m) => (m.min(), m.max()),
            Measure::Reference(r) => (r.left_edge(), r.right_edge()),
        }
    }

    /// Jump locations plus, for continuous parts, nothing.
    fn jumps(&self) -> &[f64] {
        match self {
            Measure::Empirical(m) => m.atoms(),
            Measure::Reference(r) => r.atoms(),
        }
    }

    fn has_continuous_part(&self) -> bool {
        match self {
            Measure::Empirical(_) => false,
            Measure::Reference(r) => r.atoms().is_empty(),
        }
    }
}

fn breakpoints(a: &Measure, b: &Measure) -> Vec<f64> {
    let mut pts: Vec<f64> = a.jumps().iter().chain(b.jumps()).copied().collect();
    if a.has_continuous_part() || b.has_continuous_part() {
        let (la, ra) = a.support();
        let (lb, rb) = b.support();
        let (lo, hi) = (la.min(lb), ra.max(rb));
        let step = (hi - lo) / (CONTINUOUS_GRID - 1) as f64;
        pts.extend((0..CONTINUOUS_GRID).map(|k| lo + step * k as f64));
        pts.extend([la, ra, lb, rb]);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Kolmogorov–Smirnov distance `sup_x |F_a(x) - F_b(x)|`.
///
/// Exact when at most one argument has a continuous part: the supremum is then
/// attained at a jump, approached from the left or the right.
pub fn ks_distance<'a>(a: impl Into<Measure<'a>>, b: impl Into<Measure<'a>>) -> f64 {
    let (a, b) = (a.into(), b.into());
    breakpoints(&a, &b).into_iter().fold(0.0, |acc: f64, x| {
        let right = (a.cdf(x) - b.cdf(x)).abs();
        let left = (a.cdf_left(x) - b.cdf_left(x)).abs();
        acc.max(right).max(left)
    })
}

/// Wasserstein-1 distance `∫ |F_a - F_b|`.
pub fn w1_distance<'a>(a: impl Into<Measure<'a>>, b: impl Into<Measure<'a>>) -> f64 {
    let (a, b) = (a.into(), b.into());
    let pts = breakpoints(&a, &b);
    let continuous = a.has_continuous_part() || b.has_continuous_part();
    // Three-point Gauss–Legendre nodes on [0, 1]; interior, so jumps at the
    // breakpoints never get sampled.
    const NODES: [f64; 3] = [0.112_701_665_379_258_3, 0.5, 0.887_298_334_620_741_7];
    const WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let mut terms = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let h = w[1] - w[0];
        if h <= 0.0 {
            continue;
        }
        let v = if continuous {
            NODES
                .iter()
                .zip(WEIGHTS)
                .map(|(t, wt)| {
                    let x = w[0] + t * h;
                    wt * (a.cdf(x) - b.cdf(x)).abs()
                })
                .sum::<f64>()
        } else {
            let x = 0.5 * (w[0] + w[1]);
            (a.cdf(x) - b.cdf(x)).abs()
        };
        terms.push(v * h);
    }
    crate::par::pairwise_sum(&terms)
}

/// Computable bounded-Lipschitz surrogate `min(W1, 2)`.
///
/// Test functions in the BL unit ball are 1-Lipschitz, so `d_BL <= W1`, and
/// bounded by 1, so `d_BL <= 2`. The surrogate is the smaller of the two.
pub fn bl_distance<'a>(a: impl Into<Measure<'a>>, b: impl Into<Measure<'a>>) -> f64 {
    w1_distance(a, b).min(2.0)
}
