//! Jets of `u = r^{-α} φ(θ)` at unit points and the implicit equation for `φ''`.

use super::ConeError;
use crate::linalg::{SymMatrix, MAX_DIM};
use crate::numeric::brent;
use crate::operators::OperatorSpec;

/// Upper limit on `|s|` while bracketing the root of `s ↦ F(M̂(s), p̂, x̂)`.
const S_BRACKET_LIMIT: f64 = 1.152_921_504_606_846_976e18; // 2^60

fn check_theta(theta: f64) -> Result<(), ConeError> {
    if theta == 0.0 || (theta > 0.0 && theta < std::f64::consts::PI) {
        Ok(())
    } else {
        Err(ConeError::AngleOutOfRange { theta })
    }
}

/// Cartesian unit vectors `(x̂, e_θ)` in the meridian plane spanned by `e_1`
/// and the axis `e_n`.
fn meridian(n: usize, theta: f64) -> ([f64; MAX_DIM], [f64; MAX_DIM]) {
    let (sn, cs) = theta.sin_cos();
    let mut er = [0.0; MAX_DIM];
    let mut et = [0.0; MAX_DIM];
    er[0] = sn;
    er[n - 1] = cs;
    et[0] = cs;
    et[n - 1] = -sn;
    (er, et)
}

/// Scaled Hessian `M̂(θ)` with `D²u(x) = |x|^{-α-2} M̂(θ)` in Cartesian
/// coordinates at the unit point `x̂ = sin θ e_1 + cos θ e_n`, where `s`
/// stands for `φ''(θ)`. At `θ = 0` the term `cot θ φ'` takes its limit `s`.
pub fn ansatz_hessian(
    n: usize,
    alpha: f64,
    theta: f64,
    phi: f64,
    dphi: f64,
    s: f64,
) -> Result<SymMatrix, ConeError> {
    check_theta(theta)?;
    let (er, et) = meridian(n, theta);
    let er = &er[..n];
    let et = &et[..n];
    let rot = if theta == 0.0 { s } else { dphi / theta.tan() };
    let mut m = SymMatrix::outer(er).scaled(alpha * (alpha + 1.0) * phi)
        + SymMatrix::sym_outer(er, et).scaled(-2.0 * (alpha + 1.0) * dphi)
        + SymMatrix::outer(et).scaled(s - alpha * phi);
    for k in 1..n - 1 {
        m.set(k, k, m.get(k, k) + rot - alpha * phi);
    }
    Ok(m)
}

/// Scaled gradient `p̂` with `Du(x) = |x|^{-α-1} p̂(θ)` at `x̂`.
pub fn ansatz_gradient(n: usize, alpha: f64, theta: f64, phi: f64, dphi: f64) -> Vec<f64> {
    let (er, et) = meridian(n, theta);
    (0..n).map(|i| -alpha * phi * er[i] + dphi * et[i]).collect()
}

/// The ansatz jet in the rotated frame `(e_θ, e_2, …, e_{n-1}, e_r)`, split
/// as `M̂(s) = m0 + s · dir`. Rotation-equivariant operators take the same
/// value here as in Cartesian coordinates.
#[derive(Debug, Clone)]
pub struct AnsatzFrame {
    n: usize,
    m0: SymMatrix,
    dir: SymMatrix,
    dir_trace: f64,
    p: [f64; MAX_DIM],
    x: [f64; MAX_DIM],
    scale: f64,
}

impl AnsatzFrame {
    pub fn new(n: usize, alpha: f64, theta: f64, phi: f64, dphi: f64) -> Result<Self, ConeError> {
        check_theta(theta)?;
        let (t, r) = (0, n - 1);
        let mut m0 = SymMatrix::zeros(n);
        let mut dir = SymMatrix::zeros(n);
        m0.set(r, r, alpha * (alpha + 1.0) * phi);
        m0.set(t, r, -(alpha + 1.0) * dphi);
        m0.set(t, t, -alpha * phi);
        dir.set(t, t, 1.0);
        let on_axis = theta == 0.0;
        let cot_term = if on_axis { 0.0 } else { dphi / theta.tan() };
        for k in 1..n - 1 {
            m0.set(k, k, -alpha * phi + cot_term);
            if on_axis {
                dir.set(k, k, 1.0);
            }
        }
        let mut p = [0.0; MAX_DIM];
        p[t] = dphi;
        p[r] = -alpha * phi;
        let mut x = [0.0; MAX_DIM];
        x[r] = 1.0;
        let scale = 1.0
            + (alpha * (alpha + 1.0) * phi).abs()
            + ((alpha + 1.0) * dphi).abs()
            + (alpha * phi).abs()
            + cot_term.abs();
        Ok(Self {
            n,
            m0,
            dir_trace: dir.trace(),
            dir,
            p,
            x,
            scale,
        })
    }

    /// `F(M̂(s), p̂, x̂)`.
    pub fn residual(&self, spec: &OperatorSpec, s: f64) -> f64 {
        let m = self.m0 + self.dir.scaled(s);
        spec.eval_unchecked(&m, &self.p[..self.n], &self.x[..self.n], 1.0)
    }

    /// The unique `s` with `F(M̂(s), p̂, x̂) = 0`. The map is strictly
    /// decreasing with slope in `[-Λk, -λk]`, `k = tr(dir)`, which gives the
    /// initial bracket; it is expanded geometrically if that fails.
    pub fn solve(&self, spec: &OperatorSpec, tol_root: f64) -> Result<f64, ConeError> {
        let ftol = tol_root * self.scale;
        let f = |s: f64| self.residual(spec, s);
        let f0 = f(0.0);
        if f0.abs() <= ftol {
            return Ok(0.0);
        }
        if !f0.is_finite() {
            return Err(ConeError::BracketExpansion);
        }
        let params = spec.ellipticity(self.n);
        let k = self.dir_trace;
        let sign = f0.signum();
        // near end (same sign as f0) and far end (opposite sign)
        let mut near = (0.0, f0);
        let near_guess = f0 / (params.big_lambda * k) * (1.0 - 1e-9);
        let fg = f(near_guess);
        if fg.signum() == sign && fg.is_finite() {
            near = (near_guess, fg);
        } else if fg.signum() != sign && fg.is_finite() {
            return brent(f, near.0, near_guess, near.1, fg, 0.0, ftol, 200)
                .map(|r| r.x)
                .ok_or(ConeError::BracketExpansion);
        }
        let mut far_s = f0 / (params.lambda * k) * (1.0 + 1e-9) + sign * 1e-300;
        let mut far_f = f(far_s);
        while far_f.signum() == sign {
            near = (far_s, far_f);
            far_s *= 2.0;
            if far_s.abs() > S_BRACKET_LIMIT || !far_f.is_finite() {
                return Err(ConeError::BracketExpansion);
            }
            far_f = f(far_s);
        }
        let xtol = 4.0 * f64::EPSILON * (near.0.abs() + far_s.abs());
        brent(f, near.0, far_s, near.1, far_f, xtol, ftol, 200)
            .map(|r| r.x)
            .ok_or(ConeError::BracketExpansion)
    }
}

/// Solves `F(M̂(s), p̂, x̂) = 0` for `s = φ''(θ)` at the state `(θ, φ, φ')`.
pub fn implicit_second_derivative(
    spec: &OperatorSpec,
    n: usize,
    alpha: f64,
    theta: f64,
    phi: f64,
    dphi: f64,
    tol_root: f64,
) -> Result<f64, ConeError> {
    AnsatzFrame::new(n, alpha, theta, phi, dphi)?.solve(spec, tol_root)
}
