//! Eigenvalues, log-determinants, empirical measures, distances and the
//! regularized logarithms.

mod distance;
mod eigen;
mod identities;
mod measure;
mod reglog;

pub use distance::{bl_distance, ks_distance, w1_distance, Measure};
pub use eigen::{eigenvalues, sign_log_abs_det_from_eigs, tridiagonal_eigenvalues, zero_threshold};
pub use identities::{cut_entries, hadamard_logs, rank_upper_bound, schur_resolvent_diag};
pub use measure::EmpiricalMeasure;
pub use reglog::{convex3_pieces, convex5_pieces, log_eta, log_eta_k, Convex5, RegLogParams, Schedule};

use crate::error::Result;
use crate::matrix::SymMatrix;

/// Sorted spectrum of `m` as an empirical measure.
pub fn eigvals_sym(m: &SymMatrix) -> Result<EmpiricalMeasure> {
    Ok(EmpiricalMeasure::new(eigenvalues(m)?))
}

/// `(sign, log|det M|)` from the eigenvalues. The sign is 0 and the log is
/// `-inf` when an eigenvalue falls below [`zero_threshold`].
pub fn sign_log_abs_det(m: &SymMatrix) -> Result<(i8, f64)> {
    let eigs = eigenvalues(m)?;
    Ok(sign_log_abs_det_from_eigs(&eigs, m.frobenius()))
}
