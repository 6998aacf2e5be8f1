//! Second-order central differences in `(ξ, θ) = (log r, θ)`.
//!
//! With `x = e^ξ (sin θ, cos θ)` the Hessian in the polar frame is
//! `r² D²u = [[u_ξξ - u_ξ, u_ξθ - u_θ], [u_ξθ - u_θ, u_θθ + u_ξ]]` and
//! `r Du = (u_ξ, u_θ)`. The 9-point differences of these derivatives give a
//! consistent second-order scheme without interpolation or directional
//! resolution error, but it is not monotone; it is used as a refinement of
//! the monotone solution.

use rayon::prelude::*;

use super::grid::PolarGrid;
use super::stencil::Row;
use super::FdError;
use crate::operators::{DriftMonotonicity, OperatorSpec};

/// The five polar-frame quantities `(H_rr, H_rθ, H_θθ, p_r, p_θ)` as rows.
fn derivative_rows(grid: &PolarGrid, k: usize) -> [Row; 5] {
    let (i, j) = grid.ij(k);
    let r = grid.r(k);
    let (a, b) = (grid.dlog(), grid.dtheta());
    let n = |di: isize, dj: isize| grid.index((i as isize + di) as usize, (j as isize + dj) as usize);
    let r2 = 1.0 / (r * r);
    let u_x: Row = vec![(n(1, 0), 0.5 / a), (n(-1, 0), -0.5 / a)];
    let u_t: Row = vec![(n(0, 1), 0.5 / b), (n(0, -1), -0.5 / b)];
    let u_xx: Row = vec![(n(1, 0), 1.0 / (a * a)), (k, -2.0 / (a * a)), (n(-1, 0), 1.0 / (a * a))];
    let u_tt: Row = vec![(n(0, 1), 1.0 / (b * b)), (k, -2.0 / (b * b)), (n(0, -1), 1.0 / (b * b))];
    let c = 0.25 / (a * b);
    let u_xt: Row = vec![(n(1, 1), c), (n(-1, -1), c), (n(1, -1), -c), (n(-1, 1), -c)];
    let comb = |parts: &[(&Row, f64)]| -> Row {
        let mut out: Row = Vec::new();
        for (row, s) in parts {
            for &(node, w) in row.iter() {
                match out.iter_mut().find(|e| e.0 == node) {
                    Some(e) => e.1 += s * w,
                    None => out.push((node, s * w)),
                }
            }
        }
        out
    };
    [
        comb(&[(&u_xx, r2), (&u_x, -r2)]),
        comb(&[(&u_xt, r2), (&u_t, -r2)]),
        comb(&[(&u_tt, r2), (&u_x, r2)]),
        comb(&[(&u_x, 1.0 / r)]),
        comb(&[(&u_t, 1.0 / r)]),
    ]
}

fn sym_eigs(hrr: f64, hrt: f64, htt: f64) -> [f64; 2] {
    let m = 0.5 * (hrr + htt);
    let d = (0.5 * (hrr - htt)).hypot(hrt);
    [m - d, m + d]
}

#[derive(Debug, Clone)]
pub struct CentralScheme<'a> {
    pub spec: &'a OperatorSpec,
    pub grid: &'a PolarGrid,
    rows: Vec<Option<[Row; 5]>>,
    uses_gradient: bool,
}

impl<'a> CentralScheme<'a> {
    pub fn new(spec: &'a OperatorSpec, grid: &'a PolarGrid) -> Result<Self, FdError> {
        if !spec.is_isotropic() {
            return Err(FdError::UnsupportedOperator(
                "the polar-frame scheme needs an isotropic operator".into(),
            ));
        }
        if let Some(d) = spec.required_dim() {
            if d != 2 {
                return Err(FdError::UnsupportedOperator(format!(
                    "operator is {d}-dimensional; the solver is planar"
                )));
            }
        }
        let rows = (0..grid.len())
            .map(|k| (!grid.is_boundary(k)).then(|| derivative_rows(grid, k)))
            .collect();
        Ok(Self {
            spec,
            grid,
            rows,
            uses_gradient: spec.drift_monotonicity() != DriftMonotonicity::None,
        })
    }

    fn quantities(&self, u: &[f64], k: usize) -> [f64; 5] {
        let rows = self.rows[k].as_ref().expect("interior node");
        let mut q = [0.0; 5];
        for (c, row) in rows.iter().enumerate() {
            q[c] = row.iter().map(|&(j, w)| w * u[j]).sum();
        }
        q
    }

    fn eval_quantities(&self, q: &[f64; 5], r: f64) -> f64 {
        let eigs = sym_eigs(q[0], q[1], q[2]);
        let g = if self.uses_gradient { q[3].hypot(q[4]) } else { 0.0 };
        self.spec.eval_isotropic(&eigs, g, r)
    }

    pub fn eval_node(&self, u: &[f64], k: usize) -> f64 {
        self.eval_quantities(&self.quantities(u, k), self.grid.r(k))
    }

    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        (0..self.grid.len())
            .into_par_iter()
            .map(|k| {
                if self.grid.is_boundary(k) {
                    0.0
                } else {
                    self.eval_node(u, k)
                }
            })
            .collect()
    }

    /// Jacobian row at interior node `k`, by central differences of `F` in
    /// the five polar-frame quantities.
    pub fn jacobian_row(&self, u: &[f64], k: usize) -> Row {
        let q = self.quantities(u, k);
        let r = self.grid.r(k);
        let scale = 1.0 + q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-6 * scale;
        let mut out: Row = Vec::with_capacity(9);
        let rows = self.rows[k].as_ref().expect("interior node");
        for (c, row) in rows.iter().enumerate() {
            if c >= 3 && !self.uses_gradient {
                continue;
            }
            let (mut qp, mut qm) = (q, q);
            qp[c] += eps;
            qm[c] -= eps;
            let d = (self.eval_quantities(&qp, r) - self.eval_quantities(&qm, r)) / (2.0 * eps);
            if d == 0.0 {
                continue;
            }
            for &(node, w) in row {
                match out.iter_mut().find(|e| e.0 == node) {
                    Some(e) => e.1 += d * w,
                    None => out.push((node, d * w)),
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::grid::PolarField;

    #[test]
    fn exact_on_quadratics_up_to_second_order() {
        // |x|²: Hessian 2I, so -tr = -4 and the Pucci values follow
        let g = PolarGrid::new(1.0, 2.0, 33, 33, 1.0).unwrap();
        let f = PolarField::from_fn(&g, |r, _| r * r);
        let s = CentralScheme::new(&OperatorSpec::Laplacian, &g).unwrap();
        let k = g.index(16, 10);
        assert!((s.eval_node(&f.values, k) + 4.0).abs() < 1e-2);
        let mut errs = Vec::new();
        for n in [17, 33, 65] {
            let g = PolarGrid::new(1.0, 2.0, n, n, 1.0).unwrap();
            let f = PolarField::from_fn(&g, |r, t| r.powi(-2) * (2.0 * t).cos());
            let s = CentralScheme::new(&OperatorSpec::Laplacian, &g).unwrap();
            errs.push(s.eval_node(&f.values, g.index(n / 2, n / 2)).abs());
        }
        // second order: each halving of the spacing quarters the residual
        assert!(errs[1] < 0.3 * errs[0] && errs[2] < 0.3 * errs[1], "{errs:?}");
    }

    #[test]
    fn pucci_on_saddle() {
        let g = PolarGrid::new(1.0, 3.0, 65, 65, 1.0).unwrap();
        let spec = OperatorSpec::pucci_minus(1.0, 2.0).unwrap();
        let s = CentralScheme::new(&spec, &g).unwrap();
        let f = PolarField::from_fn(&g, |r, t| 0.5 * r * r * (t.sin().powi(2) - t.cos().powi(2)));
        let v = s.eval_node(&f.values, g.index(32, 20));
        assert!((v + 1.0).abs() < 1e-2, "{v}");
    }

    #[test]
    fn jacobian_matches_difference_quotient() {
        let g = PolarGrid::new(1.0, 3.0, 17, 17, 1.0).unwrap();
        let spec = OperatorSpec::extremal_minus(1.0, 2.0, 0.7).unwrap();
        let s = CentralScheme::new(&spec, &g).unwrap();
        let f = PolarField::from_fn(&g, |r, t| r.powf(-0.8) * (1.0 + 0.3 * t).cos());
        let k = g.index(8, 6);
        let base = s.eval_node(&f.values, k);
        for &(j, w) in &s.jacobian_row(&f.values, k) {
            let mut u = f.values.clone();
            u[j] += 1e-7;
            let fd = (s.eval_node(&u, k) - base) / 1e-7;
            assert!((fd - w).abs() < 1e-4 * w.abs().max(1.0), "node {j}: {fd} vs {w}");
        }
    }
}
