use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `lower <= u[axis] <= upper`; a missing side is unbounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub axis: usize,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
}

/// `normal · u <= offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Intersection of coordinate bounds, half-spaces and an optional ball. The
/// empty intersection is all of `ℝ^m`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    #[serde(default)]
    pub bounds: Vec<Bound>,
    #[serde(default)]
    pub half_spaces: Vec<HalfSpace>,
    #[serde(default)]
    pub ball: Option<Ball>,
}

/// Slack allowed in membership tests.
const MEMBERSHIP_TOL: f64 = 1e-12;

impl Domain {
    pub fn whole() -> Self {
        Self::default()
    }

    /// One-dimensional interval.
    pub fn interval(lower: Option<f64>, upper: Option<f64>) -> Self {
        Self { bounds: vec![Bound { axis: 0, lower, upper }], ..Self::default() }
    }

    /// The single point `u`.
    pub fn point(u: &[f64]) -> Self {
        let bounds = u.iter().enumerate().map(|(axis, &x)| Bound { axis, lower: Some(x), upper: Some(x) }).collect();
        Self { bounds, ..Self::default() }
    }

    pub fn with_half_space(mut self, normal: Vec<f64>, offset: f64) -> Self {
        self.half_spaces.push(HalfSpace { normal, offset });
        self
    }

    pub fn with_ball(mut self, center: Vec<f64>, radius: f64) -> Self {
        self.ball = Some(Ball { center, radius });
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        for b in &self.bounds {
            if b.axis >= dim {
                return Err(Error::spec(format!("bound on axis {} in dimension {dim}", b.axis)));
            }
            if let (Some(l), Some(u)) = (b.lower, b.upper) {
                if !(l <= u) {
                    return Err(Error::spec(format!("empty bound [{l}, {u}] on axis {}", b.axis)));
                }
            }
        }
        for h in &self.half_spaces {
            if h.normal.len() != dim || !h.offset.is_finite() {
                return Err(Error::spec("half-space normal must have the problem dimension"));
            }
        }
        if let Some(b) = &self.ball {
            if b.center.len() != dim || !(b.radius > 0.0) {
                return Err(Error::spec("ball needs a center of the problem dimension and a positive radius"));
            }
        }
        Ok(())
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        let scale = 1.0 + u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = MEMBERSHIP_TOL * scale;
        self.bounds.iter().all(|b| b.lower.is_none_or(|l| u[b.axis] >= l - tol) && b.upper.is_none_or(|h| u[b.axis] <= h + tol))
            && self.half_spaces.iter().all(|h| h.normal.iter().zip(u).map(|(a, x)| a * x).sum::<f64>() <= h.offset + tol)
            && self.ball.as_ref().is_none_or(|b| {
                let r2: f64 = b.center.iter().zip(u).map(|(c, x)| (x - c).powi(2)).sum();
                r2.sqrt() <= b.radius + tol
            })
    }

    /// Range of coordinate `axis` implied by the bounds and the ball.
    pub fn coord_range(&self, axis: usize) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for b in self.bounds.iter().filter(|b| b.axis == axis) {
            if let Some(l) = b.lower {
                lo = lo.max(l);
            }
            if let Some(h) = b.upper {
                hi = hi.min(h);
            }
        }
        if let Some(b) = &self.ball {
            lo = lo.max(b.center[axis] - b.radius);
            hi = hi.min(b.center[axis] + b.radius);
        }
        (lo, hi)
    }
}
