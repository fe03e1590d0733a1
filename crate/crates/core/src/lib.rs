//! Numerical laboratory for the exponential growth rate of random determinants,
//! `lim (1/N) log E|det(H_N - E)|`.
//!
//! The crate is organised the way an experiment is run:
//!
//! * [`ensembles`] samples the matrix models (Wigner, sparse, band, covariance,
//!   variance profiles, block Gaussian, free addition, long-range shifts);
//! * [`spectral`] turns a sample into eigenvalues, log-determinants, empirical
//!   measures and distances, and hosts the regularized logarithms;
//! * [`reference`] builds the deterministic measures the growth rate converges
//!   to (semicircle, Marčenko–Pastur, Matrix Dyson Equation, free convolution)
//!   and integrates their log-potentials;
//! * [`experiments`] confronts the two through Monte Carlo drivers;
//! * [`variational`] evaluates and optimizes the `S_α[u]` functionals that
//!   govern matrices with long-range correlations.

pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod matrix;
pub mod output;
mod par;
pub mod reference;
pub mod rng;
pub mod spectral;
pub mod variational;

pub use ensembles::{EnsembleSpec, EntryDistribution};
pub use error::{Error, Result};
pub use matrix::SymMatrix;
pub use reference::ReferenceMeasure;
pub use spectral::EmpiricalMeasure;
