//! Angular profiles `φ(θ)` by RK4 on `(φ, φ')` with `φ''` from the implicit solve.

use serde::Serialize;

use super::ansatz::AnsatzFrame;
use super::{Branch, ConeError, ConeSpec, ShootingConfig};
use crate::linalg::norm;
use crate::numeric::brent;
use crate::operators::{fd_jet, OperatorError, OperatorSpec};

/// Extra angle integrated past `θ₀` when looking for the first zero.
const OVERSHOOT: f64 = 0.2;

/// A sampled profile of `Ψ(x) = |x|^{-α} φ(θ)` with `φ(0) = 1`, `φ'(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSolution {
    pub alpha: f64,
    pub branch: Branch,
    pub dim: usize,
    pub theta0: f64,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    /// First zero of `φ`, if one occurs before the end of integration.
    pub theta_star: Option<f64>,
}

fn hermite(t: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * t2 - 6.0 * t;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = -6.0 * t2 + 6.0 * t;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let deriv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, deriv)
}

impl ProfileSolution {
    /// Last angle covered by the samples.
    pub fn theta_end(&self) -> f64 {
        *self.theta.last().unwrap_or(&0.0)
    }

    /// `(φ(θ), φ'(θ))` by cubic Hermite interpolation.
    pub fn phi_at(&self, theta: f64) -> Option<(f64, f64)> {
        if !(theta >= 0.0 && theta <= self.theta_end()) {
            return None;
        }
        let k = self.theta.partition_point(|&t| t <= theta).clamp(1, self.theta.len() - 1);
        let (t0, t1) = (self.theta[k - 1], self.theta[k]);
        let h = t1 - t0;
        Some(hermite(
            (theta - t0) / h,
            h,
            self.phi[k - 1],
            self.phi[k],
            self.dphi[k - 1],
            self.dphi[k],
        ))
    }

    /// `Ψ(r, θ) = r^{-α} φ(θ)` on the closed cone.
    pub fn eval_polar(&self, r: f64, theta: f64) -> Result<f64, ConeError> {
        let limit = self.theta0.min(self.theta_end());
        let theta = theta.abs();
        if theta > limit + 1e-12 {
            return Err(ConeError::OutsideCone {
                theta,
                theta0: limit,
            });
        }
        let (phi, _) = self
            .phi_at(theta.min(self.theta_end()))
            .ok_or(ConeError::OutsideCone { theta, theta0: limit })?;
        Ok(r.powf(-self.alpha) * phi)
    }

    /// `Ψ(x)` for a Cartesian point, the angle measured from `e_n`.
    pub fn reconstruct(&self, x: &[f64]) -> Result<f64, ConeError> {
        if x.len() != self.dim {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            }
            .into());
        }
        let r = norm(x);
        if r == 0.0 {
            return Err(OperatorError::ZeroPoint.into());
        }
        let theta = (x[self.dim - 1] / r).clamp(-1.0, 1.0).acos();
        self.eval_polar(r, theta)
    }
}

fn rk4_rhs(
    spec: &OperatorSpec,
    n: usize,
    alpha: f64,
    tol_root: f64,
    theta: f64,
    phi: f64,
    dphi: f64,
) -> Result<(f64, f64), ConeError> {
    let s = AnsatzFrame::new(n, alpha, theta, phi, dphi)?.solve(spec, tol_root)?;
    Ok((dphi, s))
}

fn check_spec(spec: &OperatorSpec, cone: &ConeSpec) -> Result<(), ConeError> {
    if !spec.is_rotation_equivariant() {
        return Err(ConeError::NotRotationEquivariant);
    }
    if let Some(d) = spec.required_dim() {
        if d != cone.dim {
            return Err(OperatorError::DimensionMismatch {
                expected: d,
                got: cone.dim,
            }
            .into());
        }
    }
    Ok(())
}

pub(super) fn validate_inputs(
    spec: &OperatorSpec,
    cone: &ConeSpec,
    config: &ShootingConfig,
) -> Result<(), ConeError> {
    cone.validate()?;
    config.validate()?;
    check_spec(spec, cone)
}

/// Integrates the profile for a fixed `α` from the axis to the first sign
/// change of `φ` or to `θ₀ + 0.2`, whichever comes first.
pub fn integrate_profile(
    spec: &OperatorSpec,
    cone: &ConeSpec,
    alpha: f64,
    config: &ShootingConfig,
) -> Result<ProfileSolution, ConeError> {
    validate_inputs(spec, cone, config)?;
    integrate_unchecked(spec, cone, alpha, config)
}

pub(super) fn integrate_unchecked(
    spec: &OperatorSpec,
    cone: &ConeSpec,
    alpha: f64,
    config: &ShootingConfig,
) -> Result<ProfileSolution, ConeError> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(ConeError::ZeroAlpha);
    }
    let n = cone.dim;
    let tol = config.tol_root;
    let h = config.step_for(cone);
    let eps = h / 16.0;
    let theta_end = (cone.theta0 + OVERSHOOT).min(std::f64::consts::PI - h);

    let s0 = AnsatzFrame::new(n, alpha, 0.0, 1.0, 0.0)?.solve(spec, tol)?;
    let capacity = ((theta_end / h) as usize).saturating_add(3);
    let mut theta = Vec::with_capacity(capacity);
    let mut phi = Vec::with_capacity(capacity);
    let mut dphi = Vec::with_capacity(capacity);
    theta.extend([0.0, eps]);
    phi.extend([1.0, 1.0 + 0.5 * s0 * eps * eps]);
    dphi.extend([0.0, s0 * eps]);

    let f = |t: f64, y: f64, dy: f64| rk4_rhs(spec, n, alpha, tol, t, y, dy);
    let mut theta_star = None;
    loop {
        let k = theta.len() - 1;
        let (t, y, dy) = (theta[k], phi[k], dphi[k]);
        if t >= theta_end {
            break;
        }
        let step = h.min(theta_end - t);
        let k1 = f(t, y, dy)?;
        let k2 = f(t + 0.5 * step, y + 0.5 * step * k1.0, dy + 0.5 * step * k1.1)?;
        let k3 = f(t + 0.5 * step, y + 0.5 * step * k2.0, dy + 0.5 * step * k2.1)?;
        let k4 = f(t + step, y + step * k3.0, dy + step * k3.1)?;
        let y1 = y + step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        let dy1 = dy + step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let t1 = if step < h { theta_end } else { t + step };
        theta.push(t1);
        phi.push(y1);
        dphi.push(dy1);
        if y1 <= 0.0 {
            let g = |u: f64| hermite(u, step, y, y1, dy, dy1).0;
            let root = brent(g, 0.0, 1.0, y, y1, 1e-15, 0.0, 100).map_or(1.0, |r| r.x);
            theta_star = Some(t + root * step);
            break;
        }
    }
    Ok(ProfileSolution {
        alpha,
        branch: Branch::of(alpha),
        dim: n,
        theta0: cone.theta0,
        theta,
        phi,
        dphi,
        theta_star,
    })
}

/// Maximum of `|F(D²Ψ, DΨ, x)|` over `points`, with derivatives of the
/// reconstructed `Ψ` by central differences of step `h_fd`.
pub fn profile_residual(
    spec: &OperatorSpec,
    profile: &ProfileSolution,
    points: &[Vec<f64>],
    h_fd: f64,
) -> Result<f64, ConeError> {
    let u = |x: &[f64]| profile.reconstruct(x).unwrap_or(f64::NAN);
    let mut worst = 0.0f64;
    for x in points {
        profile.reconstruct(x)?;
        let (m, p) = fd_jet(&u, x, h_fd);
        let value = spec.evaluate(&m, &p, x)?;
        if value.is_nan() {
            return Err(ConeError::OutsideCone {
                theta: f64::NAN,
                theta0: profile.theta0,
            });
        }
        worst = worst.max(value.abs());
    }
    Ok(worst)
}
