//! Desk-scale numerical experiments built on the solver: manufactured
//! convergence, ratio monotonicity, singular versus bounded behaviour at the
//! vertex, axial decay rates and Harnack quotients.

use serde::{Deserialize, Serialize};

use super::diagnostics::{harnack_ratio, hopf_exponent, ratio_diagnostics, RatioTrace, LATERAL_COLLAR};
use super::grid::{BoundaryData, NodeKind, PolarField, PolarGrid};
use super::solver::{solve_dirichlet, SolveReport, SolverConfig};
use super::FdError;
use crate::cone::{shoot, Branch, ConeSpec, ProfileSolution, ShootResult, ShootingConfig};
use crate::operators::OperatorSpec;

/// `(Ψ⁺, Ψ⁻)` of a planar sector.
pub fn homogeneous_profiles(
    spec: &OperatorSpec,
    theta0: f64,
    config: &ShootingConfig,
) -> Result<(ShootResult, ShootResult), FdError> {
    let cone = ConeSpec::new(2, theta0)?;
    let plus = shoot(spec, &cone, Branch::Plus, config)?;
    let minus = shoot(spec, &cone, Branch::Minus, config)?;
    Ok((plus, minus))
}

/// `Ψ(r, θ)` clipped at zero, zero on the lateral rays.
pub fn profile_trace(profile: &ProfileSolution) -> impl Fn(f64, f64, NodeKind) -> f64 + '_ {
    move |r, theta, kind| match kind {
        NodeKind::Lateral => 0.0,
        _ => profile.eval_polar(r, theta).unwrap_or(0.0).max(0.0),
    }
}

fn profile_field(grid: &PolarGrid, profile: &ProfileSolution) -> PolarField {
    let f = profile_trace(profile);
    let mut field = PolarField::from_fn(grid, |r, t| f(r, t, NodeKind::Interior));
    for k in grid.boundary() {
        if grid.kind(k) == NodeKind::Lateral {
            field.values[k] = 0.0;
        }
    }
    field
}

#[derive(Debug, Clone, Serialize)]
pub struct ManufacturedLevel {
    pub n: usize,
    /// `max |u - Ψ⁺| / max |Ψ⁺|` over interior nodes.
    pub rel_error: f64,
    pub max_abs_error: f64,
    pub solver: SolveReport,
    #[serde(skip)]
    pub field: PolarField,
}

/// Solves with the exact `Ψ⁺` as boundary data on `n × n` grids of
/// `E(ω, r0, r1)` and measures the interior error.
pub fn experiment_manufactured(
    spec: &OperatorSpec,
    theta0: f64,
    r0: f64,
    r1: f64,
    sizes: &[usize],
    shooting: &ShootingConfig,
    config: &SolverConfig,
) -> Result<Vec<ManufacturedLevel>, FdError> {
    let (plus, _) = homogeneous_profiles(spec, theta0, shooting)?;
    let profile = &plus.profile;
    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let grid = PolarGrid::new(r0, r1, n, n, theta0)?;
        let data = BoundaryData::from_fn(&grid, profile_trace(profile));
        let sol = solve_dirichlet(spec, &grid, &data, config)?;
        let exact = profile_field(&grid, profile);
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for k in grid.interior() {
            err = err.max((sol.field.values[k] - exact.values[k]).abs());
            scale = scale.max(exact.values[k].abs());
        }
        out.push(ManufacturedLevel {
            n,
            rel_error: err / scale,
            max_abs_error: err,
            solver: sol.report,
            field: sol.field,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioExperiment {
    pub alpha_plus: f64,
    pub trace: RatioTrace,
    /// Largest increase of `Q⁺` and largest decrease of `q⁺` along the trace.
    pub big_q_increase: f64,
    pub q_decrease: f64,
    pub solver: SolveReport,
}

/// `Ψ⁺` on the inner arc, zero elsewhere on the boundary; ratio trace of the
/// solution against `Ψ⁺`.
#[allow(clippy::too_many_arguments)]
pub fn experiment_ratios(
    spec: &OperatorSpec,
    theta0: f64,
    r0: f64,
    r1: f64,
    nr: usize,
    ntheta: usize,
    r_list: &[f64],
    shooting: &ShootingConfig,
    config: &SolverConfig,
) -> Result<RatioExperiment, FdError> {
    let (plus, _) = homogeneous_profiles(spec, theta0, shooting)?;
    let grid = PolarGrid::new(r0, r1, nr, ntheta, theta0)?;
    let psi = profile_trace(&plus.profile);
    let data = BoundaryData::from_fn(&grid, |r, t, kind| match kind {
        NodeKind::InnerArc => psi(r, t, kind),
        _ => 0.0,
    });
    let sol = solve_dirichlet(spec, &grid, &data, config)?;
    let trace = ratio_diagnostics(&sol.field, &plus.profile, r_list)?;
    let (up, down) = trace.monotonicity_defects();
    Ok(RatioExperiment {
        alpha_plus: plus.alpha,
        trace,
        big_q_increase: up,
        q_decrease: down,
        solver: sol.report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingularityMode {
    /// Constant data on the inner arc, `Ψ⁻` on the outer arc.
    Bounded,
    /// `Ψ⁺` on both arcs.
    Singular,
}

impl std::str::FromStr for SingularityMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bounded" => Ok(Self::Bounded),
            "singular" => Ok(Self::Singular),
            _ => Err(format!("unknown mode {s:?} (expected bounded or singular)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityTrace {
    pub nr: usize,
    pub ntheta: usize,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    /// Ratios against `Ψ⁺` on `E(ω, r, 2r)` along the decreasing radii.
    pub plus: RatioTrace,
    /// Ratios against `Ψ⁻`.
    pub minus: RatioTrace,
    pub solver: SolveReport,
}

/// Solves on `E(ω, r0, 1)` with zero lateral data; see [`SingularityMode`]
/// for the arc data. `inner_value` is the constant of the bounded mode.
#[allow(clippy::too_many_arguments)]
pub fn experiment_singularity(
    spec: &OperatorSpec,
    theta0: f64,
    mode: SingularityMode,
    r0: f64,
    grids: &[(usize, usize)],
    r_list: &[f64],
    inner_value: f64,
    shooting: &ShootingConfig,
    config: &SolverConfig,
) -> Result<Vec<SingularityTrace>, FdError> {
    let (plus, minus) = homogeneous_profiles(spec, theta0, shooting)?;
    let (psi_p, psi_m) = (profile_trace(&plus.profile), profile_trace(&minus.profile));
    let mut out = Vec::with_capacity(grids.len());
    for &(nr, ntheta) in grids {
        let grid = PolarGrid::new(r0, 1.0, nr, ntheta, theta0)?;
        let data = BoundaryData::from_fn(&grid, |r, t, kind| match (mode, kind) {
            (_, NodeKind::Lateral | NodeKind::Interior) => 0.0,
            (SingularityMode::Singular, _) => psi_p(r, t, kind),
            (SingularityMode::Bounded, NodeKind::InnerArc) => inner_value,
            (SingularityMode::Bounded, NodeKind::OuterArc) => psi_m(r, t, kind),
        });
        let sol = solve_dirichlet(spec, &grid, &data, config)?;
        out.push(SingularityTrace {
            nr,
            ntheta,
            alpha_plus: plus.alpha,
            alpha_minus: minus.alpha,
            plus: ratio_diagnostics(&sol.field, &plus.profile, r_list)?,
            minus: ratio_diagnostics(&sol.field, &minus.profile, r_list)?,
            solver: sol.report,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfExperiment {
    pub alpha_minus: f64,
    /// Fitted slope of `log u(t e)` against `log t`.
    pub slope: f64,
    /// Fitted slope of the `Ψ⁻` field sampled on the same grid.
    pub reference_slope: f64,
    pub solver: SolveReport,
}

/// Zero data on the inner arc and lateral rays, `1` on the outer arc of
/// `E(ω, r0, 1)`; fits the axial decay rate over `t_list`.
#[allow(clippy::too_many_arguments)]
pub fn experiment_hopf(
    spec: &OperatorSpec,
    theta0: f64,
    r0: f64,
    nr: usize,
    ntheta: usize,
    t_list: &[f64],
    shooting: &ShootingConfig,
    config: &SolverConfig,
) -> Result<HopfExperiment, FdError> {
    let (_, minus) = homogeneous_profiles(spec, theta0, shooting)?;
    let grid = PolarGrid::new(r0, 1.0, nr, ntheta, theta0)?;
    let data = BoundaryData::from_fn(&grid, |_, _, kind| match kind {
        NodeKind::OuterArc => 1.0,
        _ => 0.0,
    });
    let sol = solve_dirichlet(spec, &grid, &data, config)?;
    let reference = profile_field(&grid, &minus.profile);
    Ok(HopfExperiment {
        alpha_minus: minus.alpha,
        slope: hopf_exponent(&sol.field, t_list)?,
        reference_slope: hopf_exponent(&reference, t_list)?,
        solver: sol.report,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnackExperiment {
    pub n: usize,
    pub ratio: f64,
}

/// Quotient of two solutions with inner-arc data `1` and
/// `1 + ½ cos(πθ / 2θ₀)` (zero elsewhere) over `E(ω, 2r0, 4r0)`.
pub fn experiment_harnack(
    spec: &OperatorSpec,
    theta0: f64,
    r0: f64,
    r1: f64,
    sizes: &[usize],
    config: &SolverConfig,
) -> Result<Vec<HarnackExperiment>, FdError> {
    if 4.0 * r0 > r1 {
        return Err(FdError::InvalidConfig(format!("need r1 >= 4 r0, got {r0}, {r1}")));
    }
    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let grid = PolarGrid::new(r0, r1, n, n, theta0)?;
        let a = BoundaryData::from_fn(&grid, |_, _, kind| match kind {
            NodeKind::InnerArc => 1.0,
            _ => 0.0,
        });
        let b = BoundaryData::from_fn(&grid, |_, t, kind| match kind {
            NodeKind::InnerArc => 1.0 + 0.5 * (std::f64::consts::PI * t / (2.0 * theta0)).cos(),
            _ => 0.0,
        });
        let u = solve_dirichlet(spec, &grid, &a, config)?;
        let v = solve_dirichlet(spec, &grid, &b, config)?;
        let mut nodes = grid.annulus_nodes(2.0 * r0, 4.0 * r0, LATERAL_COLLAR);
        nodes.retain(|&k| !grid.is_boundary(k));
        out.push(HarnackExperiment {
            n,
            ratio: harnack_ratio(&v.field, &u.field, &nodes)?,
        });
    }
    Ok(out)
}
