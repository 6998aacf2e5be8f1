//! Closed-form values and derivatives of the explicit barriers, written in the
//! frame whose last coordinate is the barrier axis.

use serde::Serialize;

use super::BarrierError;
use crate::linalg::{dot, norm, SymMatrix};

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierSample {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: SymMatrix,
}

/// `|x|² e_n - x_n x`, orthogonal to `x` with norm `|x| (|x|² - x_n²)^{1/2}`.
fn tangential(x: &[f64], r2: f64) -> Vec<f64> {
    let n = x.len();
    let xn = x[n - 1];
    (0..n)
        .map(|i| {
            let en = if i == n - 1 { 1.0 } else { 0.0 };
            r2 * en - xn * x[i]
        })
        .collect()
}

fn check_point(x: &[f64]) -> Result<f64, BarrierError> {
    let r = norm(x);
    if r == 0.0 || !r.is_finite() {
        return Err(BarrierError::ZeroPoint);
    }
    Ok(r)
}

/// `v(x) = |x|^{-α} (e^κ - e^{κ x_n / |x|})`.
pub fn supersolution_eval(x: &[f64], alpha: f64, kappa: f64) -> Result<BarrierSample, BarrierError> {
    let r = check_point(x)?;
    let n = x.len();
    let r2 = r * r;
    let xn = x[n - 1];
    let t = xn / r;
    let big = kappa.exp();
    let e = (kappa * t).exp();
    let g = big - e;
    let w = tangential(x, r2);
    let ra = r.powf(-alpha);

    let value = ra * g;
    let c_x = -alpha * ra / r2 * g;
    let c_w = -kappa * ra / (r2 * r) * e;
    let gradient: Vec<f64> = (0..n).map(|i| c_x * x[i] + c_w * w[i]).collect();

    let xx = SymMatrix::outer(x);
    let id = SymMatrix::identity(n);
    let r4 = r2 * r2;
    let r5 = r4 * r;
    let r6 = r4 * r2;
    let hessian = (xx.scaled(alpha + 2.0) - id.scaled(r2)).scaled(alpha * ra / r4 * g)
        + SymMatrix::sym_outer(x, &w).scaled(2.0 * kappa * (alpha + 1.0) * ra / r5 * e)
        - (xx - id.scaled(r2)).scaled(kappa * ra / r5 * xn * e)
        - SymMatrix::outer(&w).scaled(kappa * kappa * ra / r6 * e);
    Ok(BarrierSample {
        value,
        gradient,
        hessian,
    })
}

/// `φ(x) = ½ w(x)²` with `w(x) = |x|^{-α-2} x_n² - σ² |x|^{-α}`.
pub fn subsolution_eval(x: &[f64], alpha: f64, sigma: f64) -> Result<BarrierSample, BarrierError> {
    let r = check_point(x)?;
    let n = x.len();
    let r2 = r * r;
    let r4 = r2 * r2;
    let xn = x[n - 1];
    let ra = r.powf(-alpha);
    let ws = ra / r2 * xn * xn - sigma * sigma * ra;
    let wv = tangential(x, r2);

    let dw: Vec<f64> = (0..n)
        .map(|i| -alpha / r2 * ws * x[i] + 2.0 * ra / r4 * xn * wv[i])
        .collect();
    let xx = SymMatrix::outer(x);
    let id = SymMatrix::identity(n);
    let mut en_en = SymMatrix::zeros(n);
    en_en.set(n - 1, n - 1, 1.0);
    let d2w = (xx.scaled(alpha + 2.0) - id.scaled(r2)).scaled(alpha / r4 * ws)
        - (id.scaled(xn * xn) - en_en.scaled(r2)).scaled(2.0 * ra / r4)
        - SymMatrix::sym_outer(x, &wv).scaled(4.0 * (alpha + 2.0) * ra / (r4 * r2) * xn);

    let value = 0.5 * ws * ws;
    let gradient: Vec<f64> = dw.iter().map(|d| ws * d).collect();
    let hessian = d2w.scaled(ws) + SymMatrix::outer(&dw);
    debug_assert!(dot(x, &wv).abs() <= 1e-9 * r2 * r);
    Ok(BarrierSample {
        value,
        gradient,
        hessian,
    })
}
