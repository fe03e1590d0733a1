use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Shape of a single matrix entry's law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistKind {
    Gaussian,
    Rademacher,
    Uniform,
    Bernoulli { p: f64 },
    /// Classical Pareto with scale 1: `P(X > x) = x^{-a}` for `x >= 1`.
    Pareto { tail_index: f64 },
    StudentT { dof: f64 },
}

fn default_true() -> bool {
    true
}

/// Entry law, optionally standardized to mean 0 and variance 1.
///
/// When the variance is infinite (Pareto with `a <= 2`, Student-t with
/// `ν <= 2`) standardization only centers at the median.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDistribution {
    #[serde(flatten)]
    pub kind: DistKind,
    #[serde(default = "default_true")]
    pub standardized: bool,
}

impl EntryDistribution {
    pub const fn new(kind: DistKind) -> Self {
        Self { kind, standardized: true }
    }

    pub const fn gaussian() -> Self {
        Self::new(DistKind::Gaussian)
    }

    pub const fn rademacher() -> Self {
        Self::new(DistKind::Rademacher)
    }

    pub const fn uniform() -> Self {
        Self::new(DistKind::Uniform)
    }

    pub const fn pareto(tail_index: f64) -> Self {
        Self::new(DistKind::Pareto { tail_index })
    }

    pub const fn student_t(dof: f64) -> Self {
        Self::new(DistKind::StudentT { dof })
    }

    pub fn raw(mut self) -> Self {
        self.standardized = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DistKind::Bernoulli { p } if !(p > 0.0 && p < 1.0) => {
                Err(Error::spec(format!("bernoulli p must lie in (0,1), got {p}")))
            }
            DistKind::Pareto { tail_index } if !(tail_index > 0.0) => {
                Err(Error::spec(format!("pareto tail index must be positive, got {tail_index}")))
            }
            DistKind::StudentT { dof } if !(dof > 0.0) => {
                Err(Error::spec(format!("student-t degrees of freedom must be positive, got {dof}")))
            }
            _ => Ok(()),
        }
    }

    /// Mean and variance of the unstandardized law; `None` when infinite.
    pub fn raw_moments(&self) -> (Option<f64>, Option<f64>) {
        match self.kind {
            DistKind::Gaussian | DistKind::Rademacher => (Some(0.0), Some(1.0)),
            DistKind::Uniform => (Some(0.5), Some(1.0 / 12.0)),
            DistKind::Bernoulli { p } => (Some(p), Some(p * (1.0 - p))),
            DistKind::Pareto { tail_index: a } => {
                let mean = (a > 1.0).then(|| a / (a - 1.0));
                let var = (a > 2.0).then(|| a / ((a - 1.0).powi(2) * (a - 2.0)));
                (mean, var)
            }
            DistKind::StudentT { dof } => ((dof > 1.0).then_some(0.0), (dof > 2.0).then(|| dof / (dof - 2.0))),
        }
    }

    /// `true` when `E|X|^q` is finite.
    pub fn has_moment(&self, q: f64) -> bool {
        match self.kind {
            DistKind::Pareto { tail_index } => q < tail_index,
            DistKind::StudentT { dof } => q < dof,
            _ => true,
        }
    }

    fn median(&self) -> f64 {
        match self.kind {
            DistKind::Pareto { tail_index } => 2f64.powf(1.0 / tail_index),
            DistKind::Uniform => 0.5,
            DistKind::Bernoulli { p } => {
                if p > 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// Affine map `(shift, scale)` applied as `(x - shift) * scale`.
    pub fn affine(&self) -> (f64, f64) {
        if !self.standardized {
            return (0.0, 1.0);
        }
        match self.raw_moments() {
            (Some(m), Some(v)) => (m, 1.0 / v.sqrt()),
            _ => (self.median(), 1.0),
        }
    }

    fn draw_raw(&self, rng: &mut Rng) -> f64 {
        match self.kind {
            DistKind::Gaussian => rng.sample(StandardNormal),
            DistKind::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            DistKind::Uniform => rng.random::<f64>(),
            DistKind::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            DistKind::Pareto { tail_index } => {
                // 1 - U lies in (0, 1], keeping the draw finite.
                let u: f64 = 1.0 - rng.random::<f64>();
                u.powf(-1.0 / tail_index)
            }
            DistKind::StudentT { dof } => StudentT::new(dof).expect("validated dof").sample(rng),
        }
    }

    /// Draws `len` values.
    pub fn fill(&self, rng: &mut Rng, len: usize) -> Vec<f64> {
        let (shift, scale) = self.affine();
        (0..len).map(|_| (self.draw_raw(rng) - shift) * scale).collect()
    }

    pub fn draw(&self, rng: &mut Rng) -> f64 {
        let (shift, scale) = self.affine();
        (self.draw_raw(rng) - shift) * scale
    }
}

impl std::str::FromStr for EntryDistribution {
    type Err = Error;

    /// `gaussian`, `rademacher`, `uniform`, `bernoulli:P`, `pareto:A`, `student_t:NU`;
    /// a `raw:` prefix turns standardization off.
    fn from_str(s: &str) -> Result<Self> {
        let (raw, body) = match s.strip_prefix("raw:") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (name, arg) = match body.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (body, None),
        };
        let num = || -> Result<f64> {
            let a = arg.ok_or_else(|| Error::spec(format!("distribution {name} needs a parameter, e.g. {name}:1.5")))?;
            a.parse().map_err(|_| Error::spec(format!("bad parameter {a:?} for {name}")))
        };
        let kind = match name {
            "gaussian" => DistKind::Gaussian,
            "rademacher" => DistKind::Rademacher,
            "uniform" => DistKind::Uniform,
            "bernoulli" => DistKind::Bernoulli { p: num()? },
            "pareto" => DistKind::Pareto { tail_index: num()? },
            "student_t" | "student-t" => DistKind::StudentT { dof: num()? },
            _ => return Err(Error::spec(format!("unknown distribution {name:?}"))),
        };
        let d = EntryDistribution { kind, standardized: !raw };
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn standardized_laws_have_unit_variance() {
        for d in [
            EntryDistribution::gaussian(),
            EntryDistribution::rademacher(),
            EntryDistribution::uniform(),
            EntryDistribution::new(DistKind::Bernoulli { p: 0.2 }),
            EntryDistribution::pareto(5.0),
            EntryDistribution::student_t(6.0),
        ] {
            let mut rng = rng_from_seed(11);
            let n = 1_000_000;
            let xs = d.fill(&mut rng, n);
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
            let se_mean = (var / n as f64).sqrt();
            let se_var = ((m4 - var * var) / n as f64).sqrt();
            assert!(mean.abs() <= 3.0 * se_mean, "{d:?} mean {mean}");
            assert!((var - 1.0).abs() <= 3.0 * se_var, "{d:?} var {var}");
        }
    }

    #[test]
    fn heavy_tails_are_median_centered() {
        let d = EntryDistribution::pareto(1.5);
        assert_eq!(d.affine(), (2f64.powf(1.0 / 1.5), 1.0));
        assert!(!d.has_moment(2.0) && d.has_moment(1.0));
    }

    #[test]
    fn parse_names() {
        assert_eq!("pareto:1.5".parse::<EntryDistribution>().unwrap(), EntryDistribution::pareto(1.5));
        assert_eq!("raw:gaussian".parse::<EntryDistribution>().unwrap(), EntryDistribution::gaussian().raw());
        assert!("pareto".parse::<EntryDistribution>().is_err());
        assert!("cauchy".parse::<EntryDistribution>().is_err());
    }

    #[test]
    fn toml_shape() {
        let d: EntryDistribution = toml::from_str("kind = \"pareto\"\ntail_index = 1.5\n").unwrap();
        assert_eq!(d, EntryDistribution::pareto(1.5));
        let d: EntryDistribution = toml::from_str("kind = \"gaussian\"\nstandardized = false\n").unwrap();
        assert!(!d.standardized);
    }
}
