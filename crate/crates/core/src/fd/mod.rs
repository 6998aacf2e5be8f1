//! Monotone wide-stencil finite differences for Dirichlet problems of
//! isotropic operators on planar annular sectors.
//!
//! In two dimensions the Hessian eigenvalues are the extreme directional
//! second derivatives, so the scheme evaluates `F` on
//! `(min_d D_d u, max_d D_d u)` over `K` stencil directions, with an upwind
//! surrogate for `|Du|`. An optional second-order central scheme in
//! `(log r, θ)` refines the monotone solution by Newton's method.

mod central;
mod diagnostics;
mod experiments;
mod grid;
mod scheme;
mod solver;
mod stencil;

pub use central::CentralScheme;
pub use diagnostics::{harnack_ratio, hopf_exponent, ratio_diagnostics, RatioTrace, LATERAL_COLLAR};
pub use experiments::{
    experiment_harnack, experiment_hopf, experiment_manufactured, experiment_ratios,
    experiment_singularity, homogeneous_profiles, profile_trace, HarnackExperiment, HopfExperiment,
    ManufacturedLevel, RatioExperiment, SingularityMode, SingularityTrace,
};
pub use grid::{BoundaryData, NodeKind, PolarField, PolarGrid, Weights, MIN_NODES};
pub use scheme::{NodeEval, Scheme};
pub use solver::{
    solve_dirichlet, solve_from, Discretization, Solution, SolveMethod, SolveReport, SolverConfig,
};
pub use stencil::{
    apply, directional_row, upwind_gradient, Row, StencilConfig, StencilSet, UpwindGradient,
};

use thiserror::Error;

use crate::cone::ConeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid stencil: {0}")]
    InvalidStencil(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),
    #[error("no boundary value for the node at r = {r}, theta = {theta}")]
    MissingBoundary { r: f64, theta: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("radius {r} outside the grid")]
    OutsideDomain { r: f64 },
    #[error("no nodes in the annulus starting at r = {r}")]
    EmptyAnnulus { r: f64 },
    #[error("nonpositive value {value} at r = {r}, theta = {theta}")]
    NonPositive { r: f64, theta: f64, value: f64 },
    #[error(transparent)]
    Cone(#[from] ConeError),
}
