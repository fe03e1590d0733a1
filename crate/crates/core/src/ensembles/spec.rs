use serde::{Deserialize, Serialize};

use super::EntryDistribution;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// One random-matrix model together with its size and energy shift.
///
/// Field names are those used in configuration files; the variant is chosen
/// by the `model` key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum EnsembleSpec {
    /// `X/√N - E` with i.i.d. entries on and above the diagonal.
    Wigner {
        n: usize,
        dist: EntryDistribution,
        #[serde(default)]
        shift: f64,
    },
    /// Adjacency of `G(N, p)` divided by `√(N p (1-p))`, minus `E`.
    ErdosRenyi {
        n: usize,
        p: f64,
        #[serde(default)]
        shift: f64,
    },
    /// Random `d`-regular adjacency divided by `√(d (1 - d/N))`, minus `E`.
    DRegular {
        n: usize,
        d: usize,
        #[serde(default)]
        shift: f64,
    },
    /// Entries at periodic distance `<= W` from the diagonal, scaled by `1/√(2W+1)`.
    Band {
        n: usize,
        bandwidth: usize,
        dist: EntryDistribution,
        #[serde(default)]
        shift: f64,
    },
    /// `(1/N) Y Yᵀ - E` with `Y` of shape `rows x cols`.
    Covariance {
        rows: usize,
        cols: usize,
        dist: EntryDistribution,
        #[serde(default)]
        shift: f64,
    },
    /// `A + W` with independent Gaussian `W_ij ~ N(0, s_ij)`.
    VarianceProfile { mean: SymMatrix, variances: Vec<Vec<f64>> },
    /// `Σ_i a_i ⊗ E_ii + Σ_j E_jj ⊗ X_j` on `ℝ^{K×K} ⊗ ℝ^{N×N}`.
    BlockGaussian {
        blocks: usize,
        n: usize,
        /// `N` symmetric `K x K` means `a_i`.
        means: Vec<SymMatrix>,
        /// `K` profiles `s^{(j)}`, each `N x N`.
        variances: Vec<Vec<Vec<f64>>>,
        #[serde(default)]
        goe_diagonal: bool,
    },
    /// `diag(a) + O diag(b) Oᵀ - E` with Haar-distributed `O`.
    FreeAddition {
        a_diag: Vec<f64>,
        b_diag: Vec<f64>,
        #[serde(default)]
        shift: f64,
    },
    /// `base + ξ Id` with `ξ ~ N(0, σ_u²/N)`.
    LongRangeShift { base: Box<EnsembleSpec>, shift_std: f64 },
    /// Wigner matrix plus `e^{N^θ}` on the first diagonal entries `i < N^{1-θ}`.
    OutlierCounterexample { n: usize, dist: EntryDistribution, theta: f64 },
    /// Wigner matrix plus `X_0 Id` where `P(X_0 = N) = 1/N`, else `X_0 = 0`.
    KernelCounterexample { n: usize, dist: EntryDistribution },
}

fn check_rows(rows: &[Vec<f64>], n: usize, what: &str) -> Result<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::spec(format!("{what} must be {n} x {n}")));
    }
    for i in 0..n {
        for j in 0..n {
            let v = rows[i][j];
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::spec(format!("{what} must be finite and nonnegative")));
            }
            if v != rows[j][i] {
                return Err(Error::spec(format!("{what} must be symmetric")));
            }
        }
    }
    Ok(())
}

impl EnsembleSpec {
    pub fn wigner(n: usize, dist: EntryDistribution, shift: f64) -> Self {
        EnsembleSpec::Wigner { n, dist, shift }
    }

    pub fn goe(n: usize) -> Self {
        Self::wigner(n, EntryDistribution::gaussian(), 0.0)
    }

    /// Short lowercase model name.
    pub fn model_name(&self) -> &'static str {
        match self {
            EnsembleSpec::Wigner { .. } => "wigner",
            EnsembleSpec::ErdosRenyi { .. } => "erdos_renyi",
            EnsembleSpec::DRegular { .. } => "d_regular",
            EnsembleSpec::Band { .. } => "band",
            EnsembleSpec::Covariance { .. } => "covariance",
            EnsembleSpec::VarianceProfile { .. } => "variance_profile",
            EnsembleSpec::BlockGaussian { .. } => "block_gaussian",
            EnsembleSpec::FreeAddition { .. } => "free_addition",
            EnsembleSpec::LongRangeShift { .. } => "long_range_shift",
            EnsembleSpec::OutlierCounterexample { .. } => "outlier_counterexample",
            EnsembleSpec::KernelCounterexample { .. } => "kernel_counterexample",
        }
    }

    /// Side length of the sampled matrix.
    pub fn dim(&self) -> usize {
        match self {
            EnsembleSpec::Wigner { n, .. }
            | EnsembleSpec::ErdosRenyi { n, .. }
            | EnsembleSpec::DRegular { n, .. }
            | EnsembleSpec::Band { n, .. }
            | EnsembleSpec::OutlierCounterexample { n, .. }
            | EnsembleSpec::KernelCounterexample { n, .. } => *n,
            EnsembleSpec::Covariance { rows, .. } => *rows,
            EnsembleSpec::VarianceProfile { mean, .. } => mean.n(),
            EnsembleSpec::BlockGaussian { blocks, n, .. } => blocks * n,
            EnsembleSpec::FreeAddition { a_diag, .. } => a_diag.len(),
            EnsembleSpec::LongRangeShift { base, .. } => base.dim(),
        }
    }

    /// Energy `E` subtracted from the matrix (0 for models without one).
    pub fn shift(&self) -> f64 {
        match self {
            EnsembleSpec::Wigner { shift, .. }
            | EnsembleSpec::ErdosRenyi { shift, .. }
            | EnsembleSpec::DRegular { shift, .. }
            | EnsembleSpec::Band { shift, .. }
            | EnsembleSpec::Covariance { shift, .. }
            | EnsembleSpec::FreeAddition { shift, .. } => *shift,
            EnsembleSpec::LongRangeShift { base, .. } => base.shift(),
            _ => 0.0,
        }
    }

    /// Splits off the energy shift: `H(spec) = H(base) - E·Id` in law, with
    /// identical randomness for the same seed.
    pub fn split_shift(&self) -> (EnsembleSpec, f64) {
        let mut base = self.clone();
        let e = self.shift();
        match &mut base {
            EnsembleSpec::Wigner { shift, .. }
            | EnsembleSpec::ErdosRenyi { shift, .. }
            | EnsembleSpec::DRegular { shift, .. }
            | EnsembleSpec::Band { shift, .. }
            | EnsembleSpec::Covariance { shift, .. }
            | EnsembleSpec::FreeAddition { shift, .. } => *shift = 0.0,
            EnsembleSpec::LongRangeShift { base: inner, .. } => {
                let (b, _) = inner.split_shift();
                **inner = b;
            }
            _ => {}
        }
        (base, e)
    }

    /// Same model with shift replaced by `e`, where the model carries one.
    pub fn with_shift(&self, e: f64) -> EnsembleSpec {
        let mut out = self.clone();
        match &mut out {
            EnsembleSpec::Wigner { shift, .. }
            | EnsembleSpec::ErdosRenyi { shift, .. }
            | EnsembleSpec::DRegular { shift, .. }
            | EnsembleSpec::Band { shift, .. }
            | EnsembleSpec::Covariance { shift, .. }
            | EnsembleSpec::FreeAddition { shift, .. } => *shift = e,
            EnsembleSpec::LongRangeShift { base, .. } => **base = base.with_shift(e),
            _ => {}
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |n: usize, what: &str| {
            if n == 0 {
                Err(Error::spec(format!("{what} must be at least 1")))
            } else {
                Ok(())
            }
        };
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::spec(format!("{what} must be finite")))
            }
        };
        finite(self.shift(), "shift")?;
        match self {
            EnsembleSpec::Wigner { n, dist, .. } => {
                positive(*n, "N")?;
                dist.validate()
            }
            EnsembleSpec::ErdosRenyi { n, p, .. } => {
                positive(*n, "N")?;
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::spec(format!("edge probability must lie in (0,1), got {p}")));
                }
                Ok(())
            }
            EnsembleSpec::DRegular { n, d, .. } => {
                positive(*n, "N")?;
                if !(*d > 0 && d < n) || (n * d) % 2 != 0 {
                    return Err(Error::spec(format!("d-regular needs 0 < d < N and N·d even, got N={n}, d={d}")));
                }
                Ok(())
            }
            EnsembleSpec::Band { n, bandwidth, dist, .. } => {
                positive(*n, "N")?;
                if 2 * bandwidth > *n {
                    return Err(Error::spec(format!("bandwidth must satisfy W <= N/2, got W={bandwidth}, N={n}")));
                }
                dist.validate()
            }
            EnsembleSpec::Covariance { rows, cols, dist, .. } => {
                positive(*rows, "rows")?;
                positive(*cols, "cols")?;
                dist.validate()
            }
            EnsembleSpec::VarianceProfile { mean, variances } => {
                positive(mean.n(), "N")?;
                check_rows(variances, mean.n(), "variance profile")
            }
            EnsembleSpec::BlockGaussian { blocks, n, means, variances, .. } => {
                positive(*blocks, "K")?;
                positive(*n, "N")?;
                if means.len() != *n || means.iter().any(|m| m.n() != *blocks) {
                    return Err(Error::spec("block means must be N matrices of size K x K"));
                }
                if variances.len() != *blocks {
                    return Err(Error::spec("block variances must hold K profiles"));
                }
                for v in variances {
                    check_rows(v, *n, "block variance profile")?;
                }
                Ok(())
            }
            EnsembleSpec::FreeAddition { a_diag, b_diag, .. } => {
                positive(a_diag.len(), "N")?;
                if a_diag.len() != b_diag.len() {
                    return Err(Error::spec("free addition needs diagonals of equal length"));
                }
                if a_diag.iter().chain(b_diag).any(|v| !v.is_finite()) {
                    return Err(Error::spec("free addition diagonals must be finite"));
                }
                Ok(())
            }
            EnsembleSpec::LongRangeShift { base, shift_std } => {
                if !(*shift_std >= 0.0) || !shift_std.is_finite() {
                    return Err(Error::spec(format!("shift_std must be finite and >= 0, got {shift_std}")));
                }
                base.validate()
            }
            EnsembleSpec::OutlierCounterexample { n, dist, theta } => {
                positive(*n, "N")?;
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(Error::spec(format!("theta must lie in (0,1), got {theta}")));
                }
                dist.validate()
            }
            EnsembleSpec::KernelCounterexample { n, dist } => {
                positive(*n, "N")?;
                dist.validate()
            }
        }
    }

    /// Canonical JSON text, used for hashing and metadata.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json), first 16 digits.
    pub fn hash(&self) -> String {
        crate::output::short_hash(self.canonical_json().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_rejected() {
        assert!(EnsembleSpec::DRegular { n: 5, d: 3, shift: 0.0 }.validate().is_err());
        assert!(EnsembleSpec::DRegular { n: 4, d: 4, shift: 0.0 }.validate().is_err());
        assert!(EnsembleSpec::ErdosRenyi { n: 4, p: 1.0, shift: 0.0 }.validate().is_err());
        let band = EnsembleSpec::Band { n: 6, bandwidth: 4, dist: EntryDistribution::gaussian(), shift: 0.0 };
        assert!(band.validate().is_err());
        assert!(EnsembleSpec::Wigner { n: 0, dist: EntryDistribution::gaussian(), shift: 0.0 }.validate().is_err());
        let vp = EnsembleSpec::VarianceProfile {
            mean: SymMatrix::zeros(2),
            variances: vec![vec![0.1, 0.2], vec![0.3, 0.1]],
        };
        assert!(vp.validate().is_err());
    }

    #[test]
    fn toml_roundtrip() {
        let text = r#"
model = "band"
n = 100
bandwidth = 16
shift = 0.5

[dist]
kind = "rademacher"
"#;
        let spec: EnsembleSpec = toml::from_str(text).unwrap();
        assert_eq!(
            spec,
            EnsembleSpec::Band { n: 100, bandwidth: 16, dist: EntryDistribution::rademacher(), shift: 0.5 }
        );
        let back: EnsembleSpec = toml::from_str(&toml::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn split_shift_keeps_randomness() {
        let s = EnsembleSpec::wigner(3, EntryDistribution::gaussian(), 1.5);
        let (base, e) = s.split_shift();
        assert_eq!(e, 1.5);
        assert_eq!(base.shift(), 0.0);
        assert_eq!(base.with_shift(1.5), s);
    }
}
