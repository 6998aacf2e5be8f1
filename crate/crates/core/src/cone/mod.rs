//! Homogeneous singular solutions `Ψ(x) = |x|^{-α} φ(θ)` in axisymmetric
//! cones, computed by reducing the equation to an implicit ODE in the polar
//! angle `θ` (measured from the axis `e_n`) and shooting on `α`.

mod ansatz;
mod profile;
mod shooting;

pub use ansatz::{ansatz_gradient, ansatz_hessian, implicit_second_derivative, AnsatzFrame};
pub use profile::{integrate_profile, profile_residual, ProfileSolution};
pub use shooting::{alpha_minus_via_inversion, shoot, ShootResult};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::OperatorError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("invalid shooting configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("operator is not rotation-equivariant; the angular reduction does not apply")]
    NotRotationEquivariant,
    #[error("no root of F in s found within |s| ≤ 2^60 (operator not uniformly elliptic?)")]
    BracketExpansion,
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("angle {theta} outside (0, π)")]
    AngleOutOfRange { theta: f64 },
    #[error("point lies outside the cone (angle {theta} > {theta0})")]
    OutsideCone { theta: f64, theta0: f64 },
    #[error("bracket does not straddle θ₀; scanned (alpha, theta_star) table attached")]
    NoStraddle { table: Vec<(f64, Option<f64>)> },
    #[error("theta_star(alpha) is not monotone and the fallback scan found no crossing")]
    NonMonotone { table: Vec<(f64, Option<f64>)> },
}

/// The axisymmetric cone `{x ∈ Rⁿ : angle(x, e_n) < θ₀}`; a sector when `n = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub dim: usize,
    pub theta0: f64,
}

impl ConeSpec {
    pub fn new(dim: usize, theta0: f64) -> Result<Self, ConeError> {
        let c = Self { dim, theta0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConeError> {
        if !(2..=crate::linalg::MAX_DIM).contains(&self.dim) {
            return Err(ConeError::InvalidCone(format!(
                "dimension {} outside 2..=8",
                self.dim
            )));
        }
        if !(self.theta0 > 0.0 && self.theta0 < std::f64::consts::PI) {
            return Err(ConeError::InvalidCone(format!(
                "half-aperture {} outside (0, π)",
                self.theta0
            )));
        }
        Ok(())
    }
}

/// Which singular solution: `Ψ⁺` (`α > 0`, blows up at the vertex) or `Ψ⁻`
/// (`α < 0`, vanishes at the vertex).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn of(alpha: f64) -> Self {
        if alpha > 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(format!("unknown branch `{other}` (expected plus or minus)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShootingConfig {
    /// Final width of the bracket on `α`.
    pub tol_alpha: f64,
    /// RK4 step in `θ`; `None` means `θ₀ / 4096`.
    pub ode_step: Option<f64>,
    /// Residual tolerance of the implicit solve for `φ''`.
    pub tol_root: f64,
    /// Initial bracket on `|α|`.
    pub alpha_bracket: Option<(f64, f64)>,
    pub max_bisections: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            tol_alpha: 1e-9,
            ode_step: None,
            tol_root: 1e-13,
            alpha_bracket: None,
            max_bisections: 200,
        }
    }
}

impl ShootingConfig {
    pub fn step_for(&self, cone: &ConeSpec) -> f64 {
        self.ode_step.unwrap_or(cone.theta0 / 4096.0)
    }

    pub fn validate(&self) -> Result<(), ConeError> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConeError::InvalidConfig(format!("{name} = {v} must be positive")))
            }
        };
        positive(self.tol_alpha, "tol_alpha")?;
        positive(self.tol_root, "tol_root")?;
        if let Some(h) = self.ode_step {
            positive(h, "ode_step")?;
        }
        if let Some((a, b)) = self.alpha_bracket {
            if !(a > 0.0 && b > a && b.is_finite()) {
                return Err(ConeError::InvalidConfig(format!(
                    "alpha_bracket ({a}, {b}) must satisfy 0 < a < b"
                )));
            }
        }
        if self.max_bisections == 0 {
            return Err(ConeError::InvalidConfig("max_bisections must be positive".into()));
        }
        Ok(())
    }
}
