//! Polar grids on annular sectors `{r0 ≤ |x| ≤ r1, |θ| ≤ θ₀}` in the plane,
//! with `θ` measured from the axis `e_2`.

use serde::{Deserialize, Serialize};

use super::FdError;

/// Smallest node count in either direction.
pub const MIN_NODES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Interior,
    InnerArc,
    OuterArc,
    /// Either lateral ray, corners included.
    Lateral,
}

/// Geometric in `r`, uniform in `θ`; node `k = i * ntheta + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    pub r0: f64,
    pub r1: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub theta0: f64,
    radii: Vec<f64>,
    thetas: Vec<f64>,
    dlog: f64,
    dtheta: f64,
    xy: Vec<[f64; 2]>,
}

/// Interpolation stencil: node indices with nonnegative weights summing to 1.
pub type Weights = Vec<(usize, f64)>;

impl PolarGrid {
    pub fn new(r0: f64, r1: f64, nr: usize, ntheta: usize, theta0: f64) -> Result<Self, FdError> {
        if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(FdError::InvalidGrid(format!("need 0 < r0 < r1, got {r0}, {r1}")));
        }
        if nr < MIN_NODES || ntheta < MIN_NODES {
            return Err(FdError::InvalidGrid(format!(
                "need at least {MIN_NODES} nodes per direction, got {nr} x {ntheta}"
            )));
        }
        if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
            return Err(FdError::InvalidGrid(format!("theta0 = {theta0} outside (0, pi)")));
        }
        let dlog = (r1 / r0).ln() / (nr - 1) as f64;
        let dtheta = 2.0 * theta0 / (ntheta - 1) as f64;
        let radii: Vec<f64> = (0..nr)
            .map(|i| match i {
                0 => r0,
                _ if i == nr - 1 => r1,
                _ => r0 * (dlog * i as f64).exp(),
            })
            .collect();
        let thetas: Vec<f64> = (0..ntheta)
            .map(|j| {
                // mirror pairs are computed from the same expression
                let m = ntheta - 1 - j;
                if j <= m {
                    -theta0 + dtheta * j as f64
                } else {
                    theta0 - dtheta * m as f64
                }
            })
            .collect();
        let mut xy = Vec::with_capacity(nr * ntheta);
        for &r in &radii {
            for &t in &thetas {
                xy.push([r * t.sin(), r * t.cos()]);
            }
        }
        Ok(Self {
            r0,
            r1,
            nr,
            ntheta,
            theta0,
            radii,
            thetas,
            dlog,
            dtheta,
            xy,
        })
    }

    pub fn len(&self) -> usize {
        self.nr * self.ntheta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k / self.ntheta, k % self.ntheta)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn dlog(&self) -> f64 {
        self.dlog
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    pub fn r(&self, k: usize) -> f64 {
        self.radii[k / self.ntheta]
    }

    pub fn theta(&self, k: usize) -> f64 {
        self.thetas[k % self.ntheta]
    }

    pub fn xy(&self, k: usize) -> [f64; 2] {
        self.xy[k]
    }

    pub fn kind(&self, k: usize) -> NodeKind {
        let (i, j) = self.ij(k);
        if j == 0 || j == self.ntheta - 1 {
            NodeKind::Lateral
        } else if i == 0 {
            NodeKind::InnerArc
        } else if i == self.nr - 1 {
            NodeKind::OuterArc
        } else {
            NodeKind::Interior
        }
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.kind(k) != NodeKind::Interior
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&k| !self.is_boundary(k))
    }

    pub fn boundary(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&k| self.is_boundary(k))
    }

    /// Bilinear weights in `(log r, θ)` at a point of the closed sector;
    /// coordinates are clamped to the grid box.
    pub fn interpolation_weights(&self, r: f64, theta: f64) -> Weights {
        let s = ((r / self.r0).ln() / self.dlog).clamp(0.0, (self.nr - 1) as f64);
        let t = ((theta + self.theta0) / self.dtheta).clamp(0.0, (self.ntheta - 1) as f64);
        let i = (s.floor() as usize).min(self.nr - 2);
        let j = (t.floor() as usize).min(self.ntheta - 2);
        let (fs, ft) = (s - i as f64, t - j as f64);
        let mut w = Vec::with_capacity(4);
        for (di, ws) in [(0, 1.0 - fs), (1, fs)] {
            for (dj, wt) in [(0, 1.0 - ft), (1, ft)] {
                let c = ws * wt;
                if c > 0.0 {
                    w.push((self.index(i + di, j + dj), c));
                }
            }
        }
        w
    }

    /// Nodes of `E(ω, a, b)` with `a ≤ r ≤ b`, skipping `collar` angular
    /// nodes next to each lateral ray (the rays themselves always skipped).
    pub fn annulus_nodes(&self, a: f64, b: f64, collar: usize) -> Vec<usize> {
        let slack = 1e-12 * b;
        let mut out = Vec::new();
        for (i, &r) in self.radii.iter().enumerate() {
            if r < a - slack || r > b + slack {
                continue;
            }
            for j in (1 + collar)..(self.ntheta - 1 - collar).max(1 + collar) {
                out.push(self.index(i, j));
            }
        }
        out
    }
}

/// Dirichlet data on the boundary nodes; entries at interior nodes are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    values: Vec<f64>,
}

impl BoundaryData {
    /// Samples `g(r, θ, kind)` at every boundary node.
    pub fn from_fn(grid: &PolarGrid, mut g: impl FnMut(f64, f64, NodeKind) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| match grid.kind(k) {
                NodeKind::Interior => 0.0,
                kind => g(grid.r(k), grid.theta(k), kind),
            })
            .collect();
        Self { values }
    }

    pub fn constant(grid: &PolarGrid, c: f64) -> Self {
        Self::from_fn(grid, |_, _, _| c)
    }

    /// Values listed as `(r, θ, value)`; every boundary node must be matched
    /// to within `1e-9` relative in `r` and `1e-9` in `θ`.
    pub fn from_samples(grid: &PolarGrid, samples: &[(f64, f64, f64)]) -> Result<Self, FdError> {
        let mut values = vec![f64::NAN; grid.len()];
        for &(r, theta, v) in samples {
            let s = (r / grid.r0).ln() / grid.dlog;
            let t = (theta + grid.theta0) / grid.dtheta;
            let (i, j) = (s.round(), t.round());
            if i < 0.0 || j < 0.0 || i as usize >= grid.nr || j as usize >= grid.ntheta {
                continue;
            }
            let k = grid.index(i as usize, j as usize);
            if grid.is_boundary(k)
                && (grid.r(k) - r).abs() <= 1e-9 * r
                && (grid.theta(k) - theta).abs() <= 1e-9
            {
                values[k] = v;
            }
        }
        for k in grid.boundary() {
            if !values[k].is_finite() {
                return Err(FdError::MissingBoundary {
                    r: grid.r(k),
                    theta: grid.theta(k),
                });
            }
        }
        for k in grid.interior() {
            values[k] = 0.0;
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| t * v).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self, grid: &PolarGrid) -> f64 {
        grid.boundary().map(|k| self.values[k].abs()).fold(0.0, f64::max)
    }
}

/// Nodal values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField {
    pub grid: PolarGrid,
    pub values: Vec<f64>,
}

impl PolarField {
    pub fn from_fn(grid: &PolarGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.r(k), grid.theta(k))).collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// Bilinear value at `(r, θ)` in the closed sector.
    pub fn interpolate(&self, r: f64, theta: f64) -> f64 {
        self.grid
            .interpolation_weights(r, theta)
            .iter()
            .map(|&(k, w)| w * self.values[k])
            .sum()
    }

    /// Rows `(r, θ, value)` in node order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.grid.len()).map(|k| (self.grid.r(k), self.grid.theta(k), self.values[k]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_radii() {
        let g = PolarGrid::new(1.0, 4.0, 3, 5, 0.5).unwrap();
        assert_eq!(g.radii(), &[1.0, 2.0, 4.0]);
    }

    #[test]
    fn boundary_partition_counts() {
        let (nr, nt) = (9, 12);
        let g = PolarGrid::new(0.5, 3.0, nr, nt, 1.0).unwrap();
        let count = |kind| (0..g.len()).filter(|&k| g.kind(k) == kind).count();
        assert_eq!(count(NodeKind::Lateral), 2 * nr);
        assert_eq!(count(NodeKind::InnerArc) + count(NodeKind::OuterArc), 2 * nt - 4);
        assert_eq!(g.boundary().count(), 2 * nr + 2 * nt - 4);
        assert_eq!(g.interior().count(), (nr - 2) * (nt - 2));
    }

    #[test]
    fn thetas_symmetric() {
        for nt in [8, 9, 64, 65] {
            let g = PolarGrid::new(1.0, 2.0, 8, nt, 0.7).unwrap();
            let t = g.thetas();
            for j in 0..nt {
                assert_eq!(t[j], -t[nt - 1 - j]);
            }
            assert_eq!(t[0], -0.7);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PolarGrid::new(0.0, 1.0, 8, 8, 0.5).is_err());
        assert!(PolarGrid::new(2.0, 1.0, 8, 8, 0.5).is_err());
        assert!(PolarGrid::new(1.0, 2.0, 2, 8, 0.5).is_err());
        assert!(PolarGrid::new(1.0, 2.0, 8, 8, 4.0).is_err());
    }

    #[test]
    fn interpolation_reproduces_bilinear_in_log_r_theta() {
        let g = PolarGrid::new(1.0, 5.0, 11, 13, 1.2).unwrap();
        let f = |r: f64, t: f64| 2.0 + 3.0 * r.ln() - t + 0.5 * r.ln() * t;
        let field = PolarField::from_fn(&g, f);
        for &(r, t) in &[(1.3, 0.1), (4.99, -1.19), (1.0, 1.2), (5.0, 0.0)] {
            let w = g.interpolation_weights(r, t);
            assert!((w.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(w.iter().all(|x| x.1 > 0.0));
            // bilinear within a cell, exact for this function
            assert!((field.interpolate(r, t) - f(r, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn samples_round_trip() {
        let g = PolarGrid::new(1.0, 2.0, 8, 9, 0.6).unwrap();
        let bd = BoundaryData::from_fn(&g, |r, t, _| r + t);
        let rows: Vec<(f64, f64, f64)> = g.boundary().map(|k| (g.r(k), g.theta(k), bd.values()[k])).collect();
        assert_eq!(BoundaryData::from_samples(&g, &rows).unwrap(), bd);
        assert!(BoundaryData::from_samples(&g, &rows[1..]).is_err());
    }

    #[test]
    fn collar_excludes_lateral_neighbours() {
        let g = PolarGrid::new(1.0, 4.0, 9, 10, 0.8).unwrap();
        let nodes = g.annulus_nodes(1.0, 2.0, 1);
        assert!(nodes.iter().all(|&k| {
            let (_, j) = g.ij(k);
            (2..=7).contains(&j)
        }));
        assert_eq!(nodes.len(), 5 * 6);
    }
}
