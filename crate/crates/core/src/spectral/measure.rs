use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Uniform probability measure on a sorted list of eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Sorts `values` ascending. NaNs sort last under `total_cmp`.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { atoms: values }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn into_atoms(self) -> Vec<f64> {
        self.atoms
    }

    pub fn min(&self) -> f64 {
        self.atoms[0]
    }

    pub fn max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1]
    }

    /// `F(x) = #{λ_i <= x} / N`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms.partition_point(|&a| a <= x) as f64 / self.atoms.len() as f64
    }

    /// `#{λ_i < x} / N`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.atoms.partition_point(|&a| a < x) as f64 / self.atoms.len() as f64
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.atoms.iter().map(|a| a.powi(k)).sum::<f64>() / self.atoms.len() as f64
    }

    /// `(1/N) Σ log|λ_i - e|`.
    pub fn log_potential(&self, e: f64) -> f64 {
        self.atoms.iter().map(|a| (a - e).abs().ln()).sum::<f64>() / self.atoms.len() as f64
    }

    /// Counts atoms in the closed interval `[lo, hi]`.
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        self.atoms.partition_point(|&a| a <= hi) - self.atoms.partition_point(|&a| a < lo)
    }

    /// One atom per row under the header `eigenvalue`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["eigenvalue"])?;
        for a in &self.atoms {
            wr.write_record([format!("{a:.17e}")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_is_right_continuous() {
        let m = EmpiricalMeasure::new(vec![1.0, 0.0, 1.0, 2.0]);
        assert_eq!(m.atoms(), &[0.0, 1.0, 1.0, 2.0]);
        assert_eq!(m.cdf(1.0), 0.75);
        assert_eq!(m.cdf_left(1.0), 0.25);
        assert_eq!(m.cdf(-1.0), 0.0);
        assert_eq!(m.count_in(0.5, 2.0), 3);
    }

    #[test]
    fn csv_has_one_row_per_atom() {
        let m = EmpiricalMeasure::new(vec![0.5, -0.5]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 3);
        assert!(s.starts_with("eigenvalue\n-5.0"));
    }
}
