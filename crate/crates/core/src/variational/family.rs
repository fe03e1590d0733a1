use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::reference::{mde_density, DensityOptions, MdeProblem, ReferenceMeasure};
use crate::spectral::ks_distance;

type Evaluator = dyn Fn(&[f64]) -> Result<ReferenceMeasure> + Send + Sync;

/// Serializable description of a built-in family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `μ(u)` is the unit semicircle centred at `u` (the law of `W + u`).
    ShiftedSemicircle,
    /// `μ(u)` solves the MDE with mean `a0 + Σ_k u_k directions[k]` and a
    /// fixed variance profile.
    Mde {
        a0: Vec<Vec<f64>>,
        directions: Vec<Vec<Vec<f64>>>,
        variances: Vec<Vec<f64>>,
        #[serde(default = "default_mde_points")]
        points: usize,
    },
}

fn default_mde_points() -> usize {
    1001
}

/// A map `u ↦ μ_∞(u)` from `ℝ^m` to reference measures.
#[derive(Clone)]
pub struct MeasureFamily {
    name: String,
    dim: usize,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for MeasureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureFamily").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

impl MeasureFamily {
    pub fn shifted_semicircle() -> Self {
        Self::custom("shifted_semicircle", 1, |u| Ok(ReferenceMeasure::semicircle_at(1.0, u[0])))
    }

    /// MDE density with mean `a0 + Σ u_k A_k` and profile `s` (`N x N`, row-major).
    pub fn mde_family(a0: SymMatrix, directions: Vec<SymMatrix>, s: Vec<f64>, opts: DensityOptions) -> Result<Self> {
        let n = a0.n();
        if directions.is_empty() || directions.iter().any(|d| d.n() != n) {
            return Err(Error::spec("MDE family needs at least one direction of the same size as a0"));
        }
        // Fail early on a bad profile.
        MdeProblem::new(a0.clone(), s.clone())?;
        let m = directions.len();
        Ok(Self::custom("mde_family", m, move |u| {
            let mut a = a0.clone();
            for (uk, d) in u.iter().zip(&directions) {
                a = SymMatrix::from_lower_fn(n, |i, j| a.get(i, j) + uk * d.get(i, j));
            }
            let prob = MdeProblem::new(a, s.clone())?;
            Ok(mde_density(&prob, opts)?.measure)
        }))
    }

    pub fn custom(name: &str, dim: usize, f: impl Fn(&[f64]) -> Result<ReferenceMeasure> + Send + Sync + 'static) -> Self {
        Self { name: name.to_string(), dim, eval: Arc::new(f) }
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        match spec {
            FamilySpec::ShiftedSemicircle => Ok(Self::shifted_semicircle()),
            FamilySpec::Mde { a0, directions, variances, points } => {
                let a0 = SymMatrix::from_rows(a0)?;
                let dirs = directions.iter().map(|d| SymMatrix::from_rows(d)).collect::<Result<Vec<_>>>()?;
                let s: Vec<f64> = variances.iter().flatten().copied().collect();
                let opts = DensityOptions { points: *points, ..DensityOptions::default() };
                Self::mde_family(a0, dirs, s, opts)
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn measure(&self, u: &[f64]) -> Result<ReferenceMeasure> {
        if u.len() != self.dim {
            return Err(Error::param(format!("family {} expects u of length {}, got {}", self.name, self.dim, u.len())));
        }
        (self.eval)(u)
    }

    /// `d_KS(μ(u), μ(u + h e_axis))` for each `h`.
    pub fn continuity_probe(&self, u: &[f64], axis: usize, hs: &[f64]) -> Result<Vec<f64>> {
        let base = self.measure(u)?;
        hs.iter()
            .map(|&h| {
                let mut v = u.to_vec();
                v[axis] += h;
                Ok(ks_distance(&base, &self.measure(&v)?))
            })
            .collect()
    }

    /// Total mass of `μ(u)`, for probing normalization.
    pub fn mass(&self, u: &[f64]) -> Result<f64> {
        Ok(self.measure(u)?.mass())
    }
}
