//! Dirichlet solves of `F_h[u] = 0` by semismooth Newton (policy iteration)
//! with sparse LU, falling back to the damped explicit monotone update.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::central::CentralScheme;
use super::grid::{BoundaryData, PolarField, PolarGrid};
use super::scheme::Scheme;
use super::stencil::{Row, StencilConfig};
use super::FdError;
use crate::operators::OperatorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discretization {
    /// The monotone wide-stencil scheme.
    #[default]
    Monotone,
    /// The monotone solution refined by Newton on the second-order central
    /// scheme.
    Central,
}

impl std::str::FromStr for Discretization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "monotone" => Ok(Self::Monotone),
            "central" => Ok(Self::Central),
            _ => Err(format!("unknown scheme {s:?} (expected monotone or central)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Bound on the scaled residual `max_k h_k² |F_h[u]_k| / max|g|`.
    pub tol: f64,
    pub max_newton: usize,
    /// Sweep budget of the explicit fallback.
    pub max_iter: usize,
    pub stencil: StencilConfig,
    pub scheme: Discretization,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_newton: 60,
            max_iter: 200_000,
            stencil: StencilConfig::default(),
            scheme: Discretization::Monotone,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Newton,
    Explicit,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub method: SolveMethod,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: PolarField,
    pub report: SolveReport,
}

trait Discrete: Sync {
    fn residual(&self, u: &[f64]) -> Vec<f64>;
    fn jacobian_row(&self, u: &[f64], k: usize) -> Row;
}

impl Discrete for Scheme<'_> {
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        Scheme::residual(self, u)
    }
    fn jacobian_row(&self, u: &[f64], k: usize) -> Row {
        Scheme::jacobian_row(self, u, k).1
    }
}

impl Discrete for CentralScheme<'_> {
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        CentralScheme::residual(self, u)
    }
    fn jacobian_row(&self, u: &[f64], k: usize) -> Row {
        CentralScheme::jacobian_row(self, u, k)
    }
}

/// Index bookkeeping and residual scaling shared by both discretizations.
struct Layout {
    /// `h_k² / max|g|` at every node.
    weights: Vec<f64>,
    unknown: Vec<Option<usize>>,
    interior: Vec<usize>,
}

impl Layout {
    fn new(grid: &PolarGrid, data: &BoundaryData, stencil: &StencilConfig) -> Self {
        let scale = data.max_abs(grid);
        let inv_scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        let weights = (0..grid.len())
            .map(|k| {
                let h = stencil.step(grid, grid.r(k));
                h * h * inv_scale
            })
            .collect();
        let interior: Vec<usize> = grid.interior().collect();
        let mut unknown = vec![None; grid.len()];
        for (a, &k) in interior.iter().enumerate() {
            unknown[k] = Some(a);
        }
        Self {
            weights,
            unknown,
            interior,
        }
    }

    fn scaled_residual(&self, res: &[f64]) -> f64 {
        self.interior
            .iter()
            .map(|&k| (res[k] * self.weights[k]).abs())
            .fold(0.0, f64::max)
    }

    fn newton_step(&self, d: &dyn Discrete, u: &[f64], res: &[f64]) -> Result<Vec<f64>, FdError> {
        let rows: Vec<Row> = self.interior.par_iter().map(|&k| d.jacobian_row(u, k)).collect();
        let mut triplets = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for (a, row) in rows.iter().enumerate() {
            for &(k, w) in row {
                if let Some(b) = self.unknown[k] {
                    triplets.push(Triplet::new(a, b, w));
                }
            }
        }
        let n = self.interior.len();
        let jac = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| FdError::LinearSolve(format!("{e:?}")))?;
        let lu = jac.sp_lu().map_err(|e| FdError::LinearSolve(format!("{e:?}")))?;
        let rhs = Col::from_fn(n, |a| -res[self.interior[a]]);
        let delta = lu.solve(&rhs);
        let mut out = vec![0.0; u.len()];
        for (a, &k) in self.interior.iter().enumerate() {
            out[k] = delta[a];
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(FdError::LinearSolve("non-finite Newton step".into()));
        }
        Ok(out)
    }
}

struct Iterate {
    u: Vec<f64>,
    res: Vec<f64>,
    err: f64,
    iterations: usize,
}

/// Newton with a backtracking trial of up to eight halvings; the best trial
/// is kept even without decrease (the previous policy's residual is not a
/// merit function for the next), and three non-decreasing steps in a row
/// stop the loop. With `polish`, one more step is taken once converged.
fn newton(
    layout: &Layout,
    d: &dyn Discrete,
    it: &mut Iterate,
    tol: f64,
    max_newton: usize,
    polish: bool,
) {
    let mut stalled = 0;
    let start = it.iterations;
    while it.err > tol && it.iterations - start < max_newton && stalled < 3 {
        it.iterations += 1;
        let Ok(delta) = layout.newton_step(d, &it.u, &it.res) else {
            break;
        };
        let mut best: Option<(Vec<f64>, Vec<f64>, f64)> = None;
        let mut t = 1.0;
        for _ in 0..8 {
            let cand: Vec<f64> = it.u.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
            let cres = d.residual(&cand);
            let cerr = layout.scaled_residual(&cres);
            if best.as_ref().map_or(true, |b| cerr < b.2) {
                best = Some((cand, cres, cerr));
            }
            if cerr < (1.0 - 1e-4 * t) * it.err {
                break;
            }
            t *= 0.5;
        }
        let (cand, cres, cerr) = best.expect("at least one trial step");
        stalled = if cerr < it.err { 0 } else { stalled + 1 };
        it.u = cand;
        it.res = cres;
        it.err = cerr;
    }
    if polish && it.err <= tol && it.err > 0.0 && it.iterations - start < max_newton {
        if let Ok(delta) = layout.newton_step(d, &it.u, &it.res) {
            let cand: Vec<f64> = it.u.iter().zip(&delta).map(|(a, d)| a + d).collect();
            let cres = d.residual(&cand);
            let cerr = layout.scaled_residual(&cres);
            if cerr < it.err {
                it.iterations += 1;
                it.u = cand;
                it.res = cres;
                it.err = cerr;
            }
        }
    }
}

/// Solves `F_h[u] = 0` in the interior with `u = g` on the boundary.
pub fn solve_dirichlet(
    spec: &OperatorSpec,
    grid: &PolarGrid,
    data: &BoundaryData,
    config: &SolverConfig,
) -> Result<Solution, FdError> {
    solve_from(spec, grid, data, config, None)
}

/// As [`solve_dirichlet`], starting from `guess` at interior nodes.
pub fn solve_from(
    spec: &OperatorSpec,
    grid: &PolarGrid,
    data: &BoundaryData,
    config: &SolverConfig,
    guess: Option<&[f64]>,
) -> Result<Solution, FdError> {
    if data.len() != grid.len() || guess.is_some_and(|g| g.len() != grid.len()) {
        return Err(FdError::InvalidConfig("data length does not match the grid".into()));
    }
    if !(config.tol > 0.0) {
        return Err(FdError::InvalidConfig(format!("tol = {} must be positive", config.tol)));
    }
    faer::set_global_parallelism(faer::Par::Seq);
    let scheme = Scheme::new(spec, grid, config.stencil)?;
    let layout = Layout::new(grid, data, &config.stencil);
    let g = data.values();
    let u: Vec<f64> = (0..grid.len())
        .map(|k| match layout.unknown[k] {
            Some(_) => guess.map_or(0.0, |v| v[k]),
            None => g[k],
        })
        .collect();
    let res = Discrete::residual(&scheme, &u);
    let err = layout.scaled_residual(&res);
    let mut it = Iterate {
        u,
        res,
        err,
        iterations: 0,
    };
    newton(&layout, &scheme, &mut it, config.tol, config.max_newton, true);
    let mut method = SolveMethod::Newton;
    if it.err > config.tol {
        method = SolveMethod::Explicit;
        let mut sweeps = 0;
        while it.err > config.tol && sweeps < config.max_iter {
            sweeps += 1;
            it.u = (0..grid.len())
                .into_par_iter()
                .map(|k| match layout.unknown[k] {
                    Some(_) => it.u[k] - it.res[k] / scheme.diagonal_bound(k),
                    None => it.u[k],
                })
                .collect();
            it.res = Discrete::residual(&scheme, &it.u);
            it.err = layout.scaled_residual(&it.res);
        }
        it.iterations += sweeps;
    }
    if config.scheme == Discretization::Central && it.err <= config.tol {
        let central = CentralScheme::new(spec, grid)?;
        method = SolveMethod::Central;
        it.res = Discrete::residual(&central, &it.u);
        it.err = layout.scaled_residual(&it.res);
        newton(&layout, &central, &mut it, config.tol, config.max_newton, false);
    }
    let converged = it.err <= config.tol;
    Ok(Solution {
        field: PolarField {
            grid: grid.clone(),
            values: it.u,
        },
        report: SolveReport {
            iterations: it.iterations,
            final_residual: it.err,
            converged,
            method,
        },
    })
}
