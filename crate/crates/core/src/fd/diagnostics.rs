//! Ratio traces against homogeneous solutions, axial power-law fits and
//! Harnack quotients on FD fields.

use serde::Serialize;

use super::grid::{PolarField, PolarGrid};
use super::FdError;
use crate::cone::ProfileSolution;

/// Angular nodes skipped next to each lateral ray, where both `u` and `Ψ`
/// vanish.
pub const LATERAL_COLLAR: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTrace {
    pub r: Vec<f64>,
    /// `min u/Ψ` over `E(ω, r, 2r)`.
    pub q: Vec<f64>,
    /// `max u/Ψ` over `E(ω, r, 2r)`.
    pub big_q: Vec<f64>,
    #[serde(skip)]
    pub nodes: Vec<Vec<usize>>,
}

impl RatioTrace {
    /// Largest increase of `Q` and largest decrease of `q` over all pairs of
    /// radii `r < s` (both zero for `Q` nonincreasing, `q` nondecreasing).
    /// Radii must be listed in increasing order.
    pub fn monotonicity_defects(&self) -> (f64, f64) {
        let (mut up, mut down) = (0.0f64, 0.0f64);
        for a in 0..self.r.len() {
            for b in a + 1..self.r.len() {
                up = up.max(self.big_q[b] - self.big_q[a]);
                down = down.max(self.q[a] - self.q[b]);
            }
        }
        (up, down)
    }
}

/// `q(r)`, `Q(r)` of `field / Ψ` for each `r` with `[r, 2r] ⊂ [r0, r1]`.
pub fn ratio_diagnostics(
    field: &PolarField,
    profile: &ProfileSolution,
    r_list: &[f64],
) -> Result<RatioTrace, FdError> {
    let grid = &field.grid;
    let mut trace = RatioTrace {
        r: Vec::new(),
        q: Vec::new(),
        big_q: Vec::new(),
        nodes: Vec::new(),
    };
    for &r in r_list {
        if r < grid.r0 * (1.0 - 1e-12) || 2.0 * r > grid.r1 * (1.0 + 1e-12) {
            return Err(FdError::OutsideDomain { r });
        }
        let nodes = grid.annulus_nodes(r, 2.0 * r, LATERAL_COLLAR);
        if nodes.is_empty() {
            return Err(FdError::EmptyAnnulus { r });
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &k in &nodes {
            let psi = profile.eval_polar(grid.r(k), grid.theta(k))?;
            if !(psi > 0.0) {
                return Err(FdError::NonPositive {
                    r: grid.r(k),
                    theta: grid.theta(k),
                    value: psi,
                });
            }
            let ratio = field.values[k] / psi;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        trace.r.push(r);
        trace.q.push(lo);
        trace.big_q.push(hi);
        trace.nodes.push(nodes);
    }
    Ok(trace)
}

/// Value on the axis `θ = 0` at radius `t`: the two central columns are
/// averaged when `θ = 0` is not a node, and radii are interpolated linearly
/// in `(log r, log u)`, which is exact on power laws.
fn axis_value(field: &PolarField, t: f64) -> Result<f64, FdError> {
    let g: &PolarGrid = &field.grid;
    let column = |i: usize| {
        let n = g.ntheta;
        if n % 2 == 1 {
            field.values[g.index(i, n / 2)]
        } else {
            0.5 * (field.values[g.index(i, n / 2 - 1)] + field.values[g.index(i, n / 2)])
        }
    };
    let s = ((t / g.r0).ln() / g.dlog()).clamp(0.0, (g.nr - 1) as f64);
    let i = (s.floor() as usize).min(g.nr - 2);
    let f = s - i as f64;
    let (a, b) = (column(i), column(i + 1));
    if !(a > 0.0 && b > 0.0) {
        return Err(FdError::NonPositive {
            r: t,
            theta: 0.0,
            value: a.min(b),
        });
    }
    Ok(((1.0 - f) * a.ln() + f * b.ln()).exp())
}

/// Least-squares slope of `log u(t e)` against `log t` along the axis.
pub fn hopf_exponent(field: &PolarField, t_list: &[f64]) -> Result<f64, FdError> {
    let g = &field.grid;
    if t_list.len() < 2 {
        return Err(FdError::InvalidConfig("need at least two radii for a slope".into()));
    }
    let mut pts = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if t < g.r0 * (1.0 - 1e-12) || t > g.r1 * (1.0 + 1e-12) {
            return Err(FdError::OutsideDomain { r: t });
        }
        pts.push((t.ln(), axis_value(field, t)?.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(FdError::InvalidConfig("radii must not all coincide".into()));
    }
    Ok(sxy / sxx)
}

/// `sup(u/v) / inf(u/v)` over `nodes`.
pub fn harnack_ratio(u: &PolarField, v: &PolarField, nodes: &[usize]) -> Result<f64, FdError> {
    if nodes.is_empty() {
        return Err(FdError::EmptyAnnulus { r: u.grid.r0 });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &k in nodes {
        let (a, b) = (u.values[k], v.values[k]);
        if !(a > 0.0 && b > 0.0) {
            return Err(FdError::NonPositive {
                r: u.grid.r(k),
                theta: u.grid.theta(k),
                value: a.min(b),
            });
        }
        lo = lo.min(a / b);
        hi = hi.max(a / b);
    }
    Ok(hi / lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{shoot, Branch, ConeSpec, ShootingConfig};
    use crate::operators::OperatorSpec;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn laplace_profile(theta0: f64, branch: Branch) -> ProfileSolution {
        let cone = ConeSpec::new(2, theta0).unwrap();
        shoot(&OperatorSpec::Laplacian, &cone, branch, &ShootingConfig::default())
            .unwrap()
            .profile
    }

    #[test]
    fn ratios_of_the_profile_itself() {
        let p = laplace_profile(FRAC_PI_4, Branch::Plus);
        let g = PolarGrid::new(1.0, 8.0, 25, 21, FRAC_PI_4).unwrap();
        let psi = PolarField::from_fn(&g, |r, t| p.eval_polar(r, t).unwrap());
        let tr = ratio_diagnostics(&psi, &p, &[1.0, 2.0, 4.0]).unwrap();
        for (q, big) in tr.q.iter().zip(&tr.big_q) {
            assert!((q - 1.0).abs() < 1e-14 && (big - 1.0).abs() < 1e-14);
        }
        let twice = PolarField {
            values: psi.values.iter().map(|v| 2.0 * v).collect(),
            ..psi.clone()
        };
        let tr = ratio_diagnostics(&twice, &p, &[1.0, 3.0]).unwrap();
        assert!(tr.q.iter().chain(&tr.big_q).all(|v| (v - 2.0).abs() < 1e-14));
        assert!(ratio_diagnostics(&psi, &p, &[5.0]).is_err());
    }

    #[test]
    fn hopf_slopes_of_homogeneous_fields() {
        for nt in [21, 22] {
            let minus = laplace_profile(FRAC_PI_2, Branch::Minus);
            let g = PolarGrid::new(0.5, 4.0, 30, nt, FRAC_PI_2).unwrap();
            let f = PolarField::from_fn(&g, |r, t| minus.eval_polar(r, t).unwrap());
            let s = hopf_exponent(&f, &[0.6, 1.0, 1.7, 2.9, 3.9]).unwrap();
            assert!((s - 1.0).abs() < 1e-3, "{s}");
            let plus = laplace_profile(FRAC_PI_2, Branch::Plus);
            let f = PolarField::from_fn(&g, |r, t| plus.eval_polar(r, t).unwrap());
            let s = hopf_exponent(&f, &[0.6, 1.0, 1.7, 2.9, 3.9]).unwrap();
            assert!((s + plus.alpha).abs() < 1e-3, "{s}");
        }
    }

    #[test]
    fn harnack_of_multiples() {
        let g = PolarGrid::new(1.0, 2.0, 9, 9, 1.0).unwrap();
        let v = PolarField::from_fn(&g, |r, t| r + t.cos());
        let u = PolarField {
            values: v.values.iter().map(|x| 3.0 * x).collect(),
            ..v.clone()
        };
        let nodes = g.annulus_nodes(1.0, 2.0, 1);
        assert!((harnack_ratio(&v, &v, &nodes).unwrap() - 1.0).abs() < 1e-15);
        assert!((harnack_ratio(&u, &v, &nodes).unwrap() - 1.0).abs() < 1e-15);
        let z = PolarField::from_fn(&g, |_, _| 0.0);
        assert!(harnack_ratio(&z, &v, &nodes).is_err());
    }
}
