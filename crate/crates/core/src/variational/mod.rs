//! The functional `S_α[u] = ∫ log|λ| μ_∞(u)(dλ) - α‖u‖²`, its suprema over a
//! domain and over the good set, and Monte Carlo Laplace integrals.

mod domain;
mod family;
mod laplace;
mod solve;

pub use domain::{Ball, Bound, Domain, HalfSpace};
pub use family::{FamilySpec, MeasureFamily};
pub use laplace::{laplace_crosscheck, LaplaceReport, LaplaceRow, POSITIVE_DEFINITE_TOL};
pub use solve::{
    envelope_constant, good_set_membership, s_alpha, solve_restricted, solve_unrestricted, GoodSetClass, Membership,
    RestrictedSolution, TraceRow, VarProblem, VarSolution, ENVELOPE_SAFETY, GRID_POINTS, MAX_GRID_EVALUATIONS,
    MAX_SEARCH_RADIUS, RESTRICTED_EPS_STEPS,
};
