//! The monotone scheme `F_h[u]` and its piecewise-linear Jacobian.

use rayon::prelude::*;

use super::grid::PolarGrid;
use super::stencil::{apply, upwind_gradient, Row, StencilConfig, StencilSet, UpwindGradient};
use super::FdError;
use crate::operators::{DriftMonotonicity, OperatorSpec};

/// `F(diag(μ_min, μ_max), (|Du|_h, 0), x)` at every interior node, where
/// `μ_min, μ_max` are the extreme directional second differences.
#[derive(Debug, Clone)]
pub struct Scheme<'a> {
    pub spec: &'a OperatorSpec,
    pub grid: &'a PolarGrid,
    pub stencils: StencilSet,
    drift: DriftMonotonicity,
}

/// Local state of the scheme at an interior node.
#[derive(Debug, Clone, Copy)]
pub struct NodeEval {
    pub value: f64,
    pub d_min: usize,
    pub d_max: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    pub gradient: Option<UpwindGradient>,
}

impl<'a> Scheme<'a> {
    pub fn new(spec: &'a OperatorSpec, grid: &'a PolarGrid, config: StencilConfig) -> Result<Self, FdError> {
        if !spec.is_isotropic() {
            return Err(FdError::UnsupportedOperator(
                "the wide-stencil scheme needs an isotropic operator".into(),
            ));
        }
        if let Some(d) = spec.required_dim() {
            if d != 2 {
                return Err(FdError::UnsupportedOperator(format!(
                    "operator is {d}-dimensional; the solver is planar"
                )));
            }
        }
        let drift = spec.drift_monotonicity();
        if drift == DriftMonotonicity::Mixed {
            return Err(FdError::UnsupportedOperator(
                "drift coefficients of both signs admit no monotone upwind gradient".into(),
            ));
        }
        Ok(Self {
            spec,
            grid,
            stencils: StencilSet::build(grid, config)?,
            drift,
        })
    }

    pub fn eval_node(&self, u: &[f64], k: usize) -> NodeEval {
        let rows = self.stencils.rows(k);
        let (mut d_min, mut d_max) = (0, 0);
        let (mut mu_min, mut mu_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for (d, row) in rows.iter().enumerate() {
            let v = apply(row, u);
            if v < mu_min {
                mu_min = v;
                d_min = d;
            }
            if v > mu_max {
                mu_max = v;
                d_max = d;
            }
        }
        let gradient = match self.drift {
            DriftMonotonicity::Increasing => Some(upwind_gradient(self.grid, u, k, true)),
            DriftMonotonicity::Decreasing => Some(upwind_gradient(self.grid, u, k, false)),
            _ => None,
        };
        let g = gradient.map_or(0.0, |g| g.norm);
        let value = self.spec.eval_isotropic(&[mu_min, mu_max], g, self.grid.r(k));
        NodeEval {
            value,
            d_min,
            d_max,
            mu_min,
            mu_max,
            gradient,
        }
    }

    /// `F_h[u]` at all nodes; zero at boundary nodes.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        (0..self.grid.len())
            .into_par_iter()
            .map(|k| {
                if self.grid.is_boundary(k) {
                    0.0
                } else {
                    self.eval_node(u, k).value
                }
            })
            .collect()
    }

    /// Partial derivatives of `F` in `(μ_min, μ_max, |p|)` at a node state,
    /// by central differences (exact away from kinks for piecewise-linear `F`).
    fn partials(&self, e: &NodeEval, r: f64) -> [f64; 3] {
        let g = e.gradient.map_or(0.0, |g| g.norm);
        let scale = 1.0 + e.mu_min.abs().max(e.mu_max.abs()).max(g);
        let eps = 1e-6 * scale;
        let f = |a: f64, b: f64, c: f64| self.spec.eval_isotropic(&[a, b], c, r);
        let da = (f(e.mu_min + eps, e.mu_max, g) - f(e.mu_min - eps, e.mu_max, g)) / (2.0 * eps);
        let db = (f(e.mu_min, e.mu_max + eps, g) - f(e.mu_min, e.mu_max - eps, g)) / (2.0 * eps);
        let dg = if e.gradient.is_some() {
            (f(e.mu_min, e.mu_max, g + eps) - f(e.mu_min, e.mu_max, (g - eps).max(0.0)))
                / (g + eps - (g - eps).max(0.0))
        } else {
            0.0
        };
        [da, db, dg]
    }

    /// Row of the Jacobian of `F_h` at interior node `k`, merged by node.
    pub fn jacobian_row(&self, u: &[f64], k: usize) -> (NodeEval, Row) {
        let e = self.eval_node(u, k);
        let [da, db, dg] = self.partials(&e, self.grid.r(k));
        let rows = self.stencils.rows(k);
        let mut out: Row = Vec::with_capacity(24);
        let mut add = |node: usize, w: f64| {
            if w == 0.0 {
                return;
            }
            match out.iter_mut().find(|(j, _)| *j == node) {
                Some(x) => x.1 += w,
                None => out.push((node, w)),
            }
        };
        for &(j, w) in &rows[e.d_min] {
            add(j, da * w);
        }
        for &(j, w) in &rows[e.d_max] {
            add(j, db * w);
        }
        if let Some(g) = e.gradient {
            let mut centre = 0.0;
            for (j, p) in g.partials {
                add(j, dg * p);
                centre -= dg * p;
            }
            add(k, centre);
        }
        (e, out)
    }

    /// Upper bound on `∂F_h/∂u_k`, used as the damping of the explicit update.
    pub fn diagonal_bound(&self, k: usize) -> f64 {
        let p = self.spec.ellipticity(2);
        let rows = self.stencils.rows(k);
        let centre = rows
            .iter()
            .map(|row| row.iter().find(|x| x.0 == k).map_or(0.0, |x| -x.1))
            .fold(0.0, f64::max);
        let (i, _) = self.grid.ij(k);
        let radii = self.grid.radii();
        let r = radii[i];
        let hr = (r - radii[i - 1]).min(radii[i + 1] - r);
        let ht = r * self.grid.dtheta();
        let drift = if self.drift == DriftMonotonicity::None {
            0.0
        } else {
            p.mu / r * (1.0 / hr + 1.0 / ht)
        };
        2.0 * p.big_lambda * centre + drift
    }
}
