//! Deterministic reference measures: closed forms, grid densities, Matrix
//! Dyson Equation solutions and free convolutions, with their Stieltjes
//! transforms and log-potentials.

mod freeconv;
mod mde;
mod measure;
pub(crate) mod quad;

pub use freeconv::{free_convolve, FreeConvolution, Subordination, SUBORDINATION_TOL};
pub use mde::{
    block_mde_solve, mde_density, mde_solve, mde_solve_from, DensityOptions, MdeDensity, MdeProblem, MdeSolution,
    MDE_RESIDUAL_TOL,
};
pub use measure::{inversion_edge_threshold, ReferenceMeasure, Representation, GRID_EDGE_THRESHOLD};

/// Closed-form semicircle of scale `σ` centred at 0.
pub fn semicircle(sigma: f64) -> ReferenceMeasure {
    ReferenceMeasure::semicircle(sigma)
}

pub fn marchenko_pastur(gamma: f64) -> crate::Result<ReferenceMeasure> {
    ReferenceMeasure::marchenko_pastur(gamma)
}

pub fn log_potential(mu: &ReferenceMeasure, e: f64) -> f64 {
    mu.log_potential(e)
}

pub fn left_edge(mu: &ReferenceMeasure) -> f64 {
    mu.left_edge()
}
