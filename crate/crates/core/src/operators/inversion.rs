//! The inversion `x ↦ x / |x|²` acting on operators and functions.

use super::{OperatorError, OperatorSpec};
use crate::linalg::{dot, norm, SymMatrix, MAX_DIM};

/// `J(y) = I - 2 |y|⁻² y yᵀ`, symmetric and orthogonal.
pub fn reflection(y: &[f64]) -> Result<SymMatrix, OperatorError> {
    let r2 = dot(y, y);
    if r2 == 0.0 {
        return Err(OperatorError::ZeroPoint);
    }
    let n = y.len();
    Ok(SymMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - 2.0 * y[i] * y[j] / r2
    }))
}

/// `F*(M, p, y) = F(JMJ - 2|y|⁻²((y·p)J + y⊗Jp + y⊗p), Jp, y)`.
pub(super) fn eval_inverted(
    inner: &OperatorSpec,
    m: &SymMatrix,
    p: &[f64],
    y: &[f64],
    r: f64,
) -> f64 {
    let n = y.len();
    let r2 = r * r;
    let yp = dot(y, p);
    // J p = p - 2 (y·p) y / |y|²
    let mut jp = [0.0; MAX_DIM];
    for i in 0..n {
        jp[i] = p[i] - 2.0 * yp * y[i] / r2;
    }
    // J M J computed as M - 2(y (My)ᵀ + (My) yᵀ)/|y|² + 4 (yᵀMy) y yᵀ/|y|⁴
    let mut my = [0.0; MAX_DIM];
    m.mul_vec(y, &mut my);
    let ymy = dot(&my[..n], y);
    let mut out = SymMatrix::zeros(n);
    for j in 0..n {
        for i in 0..=j {
            let delta = if i == j { 1.0 } else { 0.0 };
            let jmj = m.get(i, j) - 2.0 * (y[i] * my[j] + my[i] * y[j]) / r2
                + 4.0 * ymy * y[i] * y[j] / (r2 * r2);
            let j_ij = delta - 2.0 * y[i] * y[j] / r2;
            let sym_y_jp = 0.5 * (y[i] * jp[j] + jp[i] * y[j]);
            let sym_y_p = 0.5 * (y[i] * p[j] + p[i] * y[j]);
            out.set(i, j, jmj - 2.0 / r2 * (yp * j_ij + sym_y_jp + sym_y_p));
        }
    }
    inner.eval_unchecked(&out, &jp[..n], y, r)
}

/// Both sides of `F*(D²u*, Du*, y) = |y|⁻⁴ F(D²u, Du, x)` at `x = y/|y|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionResidual {
    /// `F*(D²u*(y), Du*(y), y)`.
    pub inverted: f64,
    /// `|y|⁻⁴ F(D²u(x), Du(x), x)`.
    pub direct: f64,
}

/// Central-difference gradient and Hessian of `f` at `z`.
pub(crate) fn fd_jet(
    f: &dyn Fn(&[f64]) -> f64,
    z: &[f64],
    h: f64,
) -> (SymMatrix, Vec<f64>) {
    let n = z.len();
    let mut pt = z.to_vec();
    let f0 = f(z);
    let mut grad = vec![0.0; n];
    let mut hess = SymMatrix::zeros(n);
    for i in 0..n {
        pt[i] = z[i] + h;
        let fp = f(&pt);
        pt[i] = z[i] - h;
        let fm = f(&pt);
        pt[i] = z[i];
        grad[i] = (fp - fm) / (2.0 * h);
        hess.set(i, i, (fp - 2.0 * f0 + fm) / (h * h));
        for j in 0..i {
            let mut eval = |si: f64, sj: f64| {
                pt[i] = z[i] + si * h;
                pt[j] = z[j] + sj * h;
                let v = f(&pt);
                pt[i] = z[i];
                pt[j] = z[j];
                v
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                / (4.0 * h * h);
            hess.set(i, j, v);
        }
    }
    (hess, grad)
}

/// Checks the inversion identity for a smooth `u` at `y` using central
/// differences of step `h` for both `u*` and `u`.
pub fn invert_function_residual(
    spec: &OperatorSpec,
    u: &dyn Fn(&[f64]) -> f64,
    y: &[f64],
    h: f64,
) -> Result<InversionResidual, OperatorError> {
    let ry = norm(y);
    if ry == 0.0 {
        return Err(OperatorError::ZeroPoint);
    }
    let x: Vec<f64> = y.iter().map(|v| v / (ry * ry)).collect();
    let rx = norm(&x);
    // stencils must stay clear of the origin on both sides
    let reach = h * (2.0f64).sqrt();
    if reach >= 0.5 * ry || reach >= 0.5 * rx {
        return Err(OperatorError::StencilHitsOrigin {
            step: h,
            radius: ry.min(rx),
        });
    }
    let u_star = |z: &[f64]| {
        let r2 = dot(z, z);
        let w: Vec<f64> = z.iter().map(|v| v / r2).collect();
        u(&w)
    };
    let (m_star, p_star) = fd_jet(&u_star, y, h);
    let (m, p) = fd_jet(u, &x, h);
    let inverted = spec.invert().evaluate(&m_star, &p_star, y)?;
    let direct = spec.evaluate(&m, &p, &x)? / ry.powi(4);
    Ok(InversionResidual { inverted, direct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Jet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reflection_acts_as_mirror() {
        let j = reflection(&[1.0, 0.0, 0.0]).unwrap();
        let mut out = [0.0; 3];
        j.mul_vec(&[1.0, 0.0, 0.0], &mut out);
        assert_eq!(out, [-1.0, 0.0, 0.0]);
        j.mul_vec(&[0.0, 1.0, 0.0], &mut out);
        assert_eq!(out, [0.0, 1.0, 0.0]);
        assert!(reflection(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn reflection_is_orthogonal() {
        let y = [0.3, -1.2, 0.7];
        let j = reflection(&y).unwrap();
        let rows = j.to_rows();
        let jj = j.congruence(&rows);
        // Jᵀ J J = J when J² = I
        assert!((jj - j).norm() < 1e-14);
    }

    #[test]
    fn inverted_laplacian_has_radial_drift() {
        // direct consequence of the inversion formula:
        // (-Δ)* = -tr M + 2 (n-2) |y|⁻² y·p
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=4 {
            let inv = OperatorSpec::Laplacian.invert();
            for _ in 0..20 {
                let m = SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
                let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.5)).collect();
                let expect = -m.trace() + 2.0 * (n as f64 - 2.0) * dot(&y, &p) / dot(&y, &y);
                let got = inv.eval(&Jet::new(m, p, y).unwrap()).unwrap();
                assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
            }
        }
    }

    #[test]
    fn linear_function_stays_harmonic() {
        let u = |x: &[f64]| x[2];
        for y in [[0.5, 0.2, 1.0], [1.0, -0.3, 0.4]] {
            let r = invert_function_residual(&OperatorSpec::Laplacian, &u, &y, 1e-4).unwrap();
            assert!(r.inverted.abs() < 1e-5 && r.direct.abs() < 1e-5, "{r:?}");
        }
    }

    #[test]
    fn quadratic_residuals_match_hand_value() {
        // u = x0² + 3 x0 x1 - x1² + 0.5 x2²: D²u has trace 2 - 2 + 1 = 1
        let u = |x: &[f64]| x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[1] + 0.5 * x[2] * x[2];
        let y = [0.6, 0.8, 0.5];
        let ry2: f64 = y.iter().map(|v| v * v).sum();
        let expect = -1.0 / (ry2 * ry2);
        let r = invert_function_residual(&OperatorSpec::Laplacian, &u, &y, 1e-4).unwrap();
        assert!((r.direct - expect).abs() < 1e-6);
        assert!((r.inverted - expect).abs() < 1e-5, "{r:?}");
        let u2 = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let r = invert_function_residual(&OperatorSpec::Laplacian, &u2, &y, 1e-4).unwrap();
        assert!((r.inverted - r.direct).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn nonlinear_operator_identity() {
        let spec = OperatorSpec::extremal_minus(1.0, 2.5, 0.8).unwrap();
        let u = |x: &[f64]| x[0] * x[1] + x[1].powi(3) - 0.3 * x[0] * x[0];
        let r = invert_function_residual(&spec, &u, &[0.7, 0.9], 1e-4).unwrap();
        assert!((r.inverted - r.direct).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn stencil_collision_is_an_error() {
        let u = |x: &[f64]| x[0];
        assert!(invert_function_residual(&OperatorSpec::Laplacian, &u, &[1e-3, 0.0], 1e-3).is_err());
    }
}
