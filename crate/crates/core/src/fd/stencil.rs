//! Wide-stencil directional second differences and upwind gradient norms.

use serde::{Deserialize, Serialize};

use super::grid::PolarGrid;
use super::FdError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StencilConfig {
    /// Number of directions, uniform on the half circle; must be even.
    pub directions: usize,
    /// Step `h = step_scale · r · δ^{1/2}` with `δ = max(Δ log r, Δθ)`.
    pub step_scale: f64,
}

impl Default for StencilConfig {
    fn default() -> Self {
        Self {
            directions: 16,
            step_scale: 0.5,
        }
    }
}

impl StencilConfig {
    pub fn validate(&self) -> Result<(), FdError> {
        if self.directions < 2 || self.directions % 2 != 0 {
            return Err(FdError::InvalidStencil(format!(
                "direction count {} must be even and at least 2",
                self.directions
            )));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(FdError::InvalidStencil(format!(
                "step_scale {} must be positive",
                self.step_scale
            )));
        }
        Ok(())
    }

    /// Angles `kπ/K` measured from the outward radial direction.
    pub fn angles(&self) -> Vec<f64> {
        (0..self.directions)
            .map(|k| std::f64::consts::PI * k as f64 / self.directions as f64)
            .collect()
    }

    pub fn step(&self, grid: &PolarGrid, r: f64) -> f64 {
        self.step_scale * r * grid.dlog().max(grid.dtheta()).sqrt()
    }
}

/// A linear functional `u ↦ Σ w_k u_k`.
pub type Row = Vec<(usize, f64)>;

/// Directional second-difference rows for every interior node.
#[derive(Debug, Clone)]
pub struct StencilSet {
    pub config: StencilConfig,
    /// `rows[node][d]`, empty for boundary nodes.
    rows: Vec<Vec<Row>>,
}

/// Distance along `e` from `x` to the first exit from the sector, if below
/// `h`, together with the exit point in polar coordinates (snapped onto the
/// boundary curve it hits).
fn boundary_hit(grid: &PolarGrid, x: [f64; 2], e: [f64; 2], h: f64) -> Option<(f64, f64, f64)> {
    let xe = x[0] * e[0] + x[1] * e[1];
    let xx = x[0] * x[0] + x[1] * x[1];
    let mut best: Option<(f64, Snap)> = None;
    let mut consider = |t: f64, snap: Snap| {
        if t > 0.0 && t < h && best.map_or(true, |(b, _)| t < b) {
            best = Some((t, snap));
        }
    };
    let disc = xe * xe - (xx - grid.r0 * grid.r0);
    if xe < 0.0 && disc >= 0.0 {
        consider(-xe - disc.sqrt(), Snap::Radius(grid.r0));
    }
    let disc = xe * xe + (grid.r1 * grid.r1 - xx);
    consider(-xe + disc.max(0.0).sqrt(), Snap::Radius(grid.r1));
    let (s0, c0) = grid.theta0.sin_cos();
    for side in [-1.0, 1.0] {
        let denom = e[0] * c0 - side * e[1] * s0;
        if denom == 0.0 {
            continue;
        }
        let t = -(x[0] * c0 - side * x[1] * s0) / denom;
        let y = [x[0] + t * e[0], x[1] + t * e[1]];
        if y[0] * side * s0 + y[1] * c0 > 0.0 {
            consider(t, Snap::Angle(side * grid.theta0));
        }
    }
    best.map(|(t, snap)| {
        let y = [x[0] + t * e[0], x[1] + t * e[1]];
        let (r, theta) = polar(y);
        match snap {
            Snap::Radius(rb) => (t, rb, theta.clamp(-grid.theta0, grid.theta0)),
            Snap::Angle(tb) => (t, r.clamp(grid.r0, grid.r1), tb),
        }
    })
}

#[derive(Debug, Clone, Copy)]
enum Snap {
    Radius(f64),
    Angle(f64),
}

fn polar(y: [f64; 2]) -> (f64, f64) {
    (y[0].hypot(y[1]), y[0].atan2(y[1]))
}

fn push_merged(row: &mut Row, k: usize, w: f64) {
    match row.iter_mut().find(|(j, _)| *j == k) {
        Some(e) => e.1 += w,
        None => row.push((k, w)),
    }
}

/// Interpolation weights of the endpoint `x + s·h·e` and the step actually
/// used, shrunk to the boundary hit if the segment leaves the sector.
fn endpoint(grid: &PolarGrid, x: [f64; 2], e: [f64; 2], h: f64) -> (f64, Row) {
    match boundary_hit(grid, x, e, h) {
        Some((t, r, theta)) => (t, grid.interpolation_weights(r, theta)),
        None => {
            let (r, theta) = polar([x[0] + h * e[0], x[1] + h * e[1]]);
            (h, grid.interpolation_weights(r, theta))
        }
    }
}

/// `2/(h₊+h₋) [(u₊ - u₀)/h₊ + (u₋ - u₀)/h₋]` as a row; all off-centre
/// weights are nonnegative and the row sums to zero.
pub fn directional_row(grid: &PolarGrid, node: usize, angle: f64, h: f64) -> Row {
    let x = grid.xy(node);
    let theta = grid.theta(node);
    let (er, et) = ([theta.sin(), theta.cos()], [theta.cos(), -theta.sin()]);
    let (ca, sa) = (angle.cos(), angle.sin());
    let e = [ca * er[0] + sa * et[0], ca * er[1] + sa * et[1]];
    let (hp, wp) = endpoint(grid, x, e, h);
    let (hm, wm) = endpoint(grid, x, [-e[0], -e[1]], h);
    let cp = 2.0 / ((hp + hm) * hp);
    let cm = 2.0 / ((hp + hm) * hm);
    let mut row: Row = vec![(node, -(cp + cm))];
    for (k, w) in wp {
        push_merged(&mut row, k, cp * w);
    }
    for (k, w) in wm {
        push_merged(&mut row, k, cm * w);
    }
    row
}

impl StencilSet {
    pub fn build(grid: &PolarGrid, config: StencilConfig) -> Result<Self, FdError> {
        config.validate()?;
        let angles = config.angles();
        let rows = (0..grid.len())
            .map(|k| {
                if grid.is_boundary(k) {
                    return Vec::new();
                }
                let h = config.step(grid, grid.r(k));
                angles.iter().map(|&a| directional_row(grid, k, a, h)).collect()
            })
            .collect();
        Ok(Self { config, rows })
    }

    pub fn rows(&self, node: usize) -> &[Row] {
        &self.rows[node]
    }

    pub fn directions(&self) -> usize {
        self.config.directions
    }
}

pub fn apply(row: &Row, u: &[f64]) -> f64 {
    row.iter().map(|&(k, w)| w * u[k]).sum()
}

/// Upwind gradient-norm surrogate at an interior node, with the one-sided
/// differences that realize it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpwindGradient {
    pub norm: f64,
    /// `(neighbour, ∂ norm / ∂ u_neighbour)`; the centre gets minus their sum.
    pub partials: [(usize, f64); 2],
}

/// Rouy–Tourin surrogate of `|Du|` at interior node `k`.
///
/// With `increasing = true` the result is nondecreasing in `u_k` and
/// nonincreasing in the neighbours (for drifts `+μ|p|`); otherwise the reverse.
pub fn upwind_gradient(grid: &PolarGrid, u: &[f64], k: usize, increasing: bool) -> UpwindGradient {
    let (i, j) = grid.ij(k);
    let radii = grid.radii();
    let r = radii[i];
    let dt = r * grid.dtheta();
    let u0 = u[k];
    let axes = [
        (grid.index(i - 1, j), r - radii[i - 1], grid.index(i + 1, j), radii[i + 1] - r),
        (grid.index(i, j - 1), dt, grid.index(i, j + 1), dt),
    ];
    let mut comps = [(0usize, 0.0f64, 0.0f64); 2];
    for (c, &(km, hm, kp, hp)) in axes.iter().enumerate() {
        let sign = if increasing { 1.0 } else { -1.0 };
        let back = sign * (u0 - u[km]) / hm;
        let fwd = sign * (u0 - u[kp]) / hp;
        comps[c] = if back >= fwd && back > 0.0 {
            (km, back, 1.0 / hm)
        } else if fwd > 0.0 {
            (kp, fwd, 1.0 / hp)
        } else {
            (k, 0.0, 0.0)
        };
    }
    let norm = comps[0].1.hypot(comps[1].1);
    let partials = if norm > 0.0 {
        let sign = if increasing { -1.0 } else { 1.0 };
        [
            (comps[0].0, sign * comps[0].1 / norm * comps[0].2),
            (comps[1].0, sign * comps[1].1 / norm * comps[1].2),
        ]
    } else {
        [(k, 0.0), (k, 0.0)]
    };
    UpwindGradient { norm, partials }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::grid::PolarField;

    fn grid() -> PolarGrid {
        PolarGrid::new(1.0, 4.0, 41, 41, 1.0).unwrap()
    }

    #[test]
    fn rows_are_monotone_and_consistent_on_constants() {
        let g = grid();
        let st = StencilSet::build(&g, StencilConfig::default()).unwrap();
        for k in g.interior() {
            for row in st.rows(k) {
                let sum: f64 = row.iter().map(|x| x.1).sum();
                let scale = row.iter().map(|x| x.1.abs()).fold(0.0, f64::max);
                assert!(sum.abs() <= 1e-12 * scale);
                for &(j, w) in row {
                    if j != k {
                        assert!(w >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn affine_gives_zero() {
        // interpolation error of an affine function in (log r, θ), which
        // vanishes under refinement
        let mut worst = Vec::new();
        for n in [21, 41, 81] {
            let g = PolarGrid::new(1.0, 4.0, n, n, 1.0).unwrap();
            let st = StencilSet::build(&g, StencilConfig::default()).unwrap();
            let f = PolarField::from_fn(&g, |r, t| 1.0 + 2.0 * r * t.sin() - 0.5 * r * t.cos());
            let mut w: f64 = 0.0;
            for k in g.interior() {
                for row in st.rows(k) {
                    w = w.max(apply(row, &f.values).abs());
                }
            }
            worst.push(w);
        }
        assert!(worst[0] < 0.5 && worst[1] < worst[0] && worst[2] < worst[1], "{worst:?}");
    }

    #[test]
    fn squared_norm_converges_to_one() {
        let mut errs = Vec::new();
        for n in [17, 33, 65] {
            let g = PolarGrid::new(1.0, 3.0, n, n, 0.9).unwrap();
            let st = StencilSet::build(&g, StencilConfig::default()).unwrap();
            let f = PolarField::from_fn(&g, |r, _| 0.5 * r * r);
            let k = g.index(n / 2, n / 2);
            let e = st
                .rows(k)
                .iter()
                .map(|row| (apply(row, &f.values) - 1.0).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        assert!(errs[2] < 0.05, "{errs:?}");
    }

    #[test]
    fn boundary_hits_shrink_the_step() {
        let g = PolarGrid::new(1.0, 2.0, 9, 9, 0.5).unwrap();
        let k = g.index(1, 4);
        // inward radial direction from the first interior ring
        let x = g.xy(k);
        let theta = g.theta(k);
        let e = [-theta.sin(), -theta.cos()];
        let (t, r, th) = boundary_hit(&g, x, e, 10.0).unwrap();
        assert!((t - (g.r(k) - 1.0)).abs() < 1e-12);
        assert_eq!(r, 1.0);
        assert!((th - theta).abs() < 1e-12);
        let k = g.index(4, 7);
        let (er, et) = ([g.theta(k).sin(), g.theta(k).cos()], [g.theta(k).cos(), -g.theta(k).sin()]);
        let (t, _, th) = boundary_hit(&g, g.xy(k), et, 10.0).unwrap();
        assert_eq!(th, 0.5);
        assert!(t > 0.0 && t < g.r(k) * 0.2);
        assert!(boundary_hit(&g, g.xy(k), er, 1e-3).is_none());
    }

    #[test]
    fn upwind_gradient_monotonicity() {
        let g = grid();
        let f = PolarField::from_fn(&g, |r, t| r * r * (1.0 + t));
        let k = g.index(20, 20);
        for inc in [true, false] {
            let base = upwind_gradient(&g, &f.values, k, inc).norm;
            let mut u = f.values.clone();
            u[k] += 1e-3;
            let up = upwind_gradient(&g, &u, k, inc).norm;
            if inc {
                assert!(up >= base);
            } else {
                assert!(up <= base);
            }
        }
        let ug = upwind_gradient(&g, &f.values, k, true);
        // |Du| = |2r(1+θ), r| at θ = 0, r = 2
        let r = g.r(k);
        let exact = (2.0 * r).hypot(r);
        assert!((ug.norm - exact).abs() < 0.1 * exact, "{} {exact}", ug.norm);
    }
}
