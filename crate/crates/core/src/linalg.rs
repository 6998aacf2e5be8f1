//! Small dense symmetric matrices and the cyclic Jacobi eigensolver.
//!
//! Matrices here are tiny (dimension 2..=8) and evaluated millions of times
//! inside the ODE and FD loops, so storage is a fixed packed upper triangle
//! on the stack.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;
const PACKED_LEN: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// Off-diagonal threshold for the Jacobi sweeps.
pub const JACOBI_THRESHOLD: f64 = 1e-14;
/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 30;

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// Symmetric `dim x dim` matrix stored as its upper triangle.
#[derive(Clone, Copy, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: [f64; PACKED_LEN],
}

impl std::fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymMatrix")
            .field("dim", &self.dim)
            .field("rows", &self.to_rows())
            .finish()
    }
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "matrix dimension {dim} outside 1..={MAX_DIM}"
        );
        Self {
            dim,
            data: [0.0; PACKED_LEN],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, value);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            for i in 0..=j {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from full rows; the lower triangle is ignored.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let dim = rows.len();
        if !(1..=MAX_DIM).contains(&dim) || rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    /// Symmetric tensor product `a ⊗ b = (a bᵀ + b aᵀ) / 2`.
    pub fn sym_outer(a: &[f64], b: &[f64]) -> Self {
        debug_assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| 0.5 * (a[i] * b[j] + b[i] * a[j]))
    }

    /// `a aᵀ`.
    pub fn outer(a: &[f64]) -> Self {
        Self::from_fn(a.len(), |i, j| a[i] * a[j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[packed_index(i, j)] = value;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.dim {
            for i in 0..=j {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    pub fn scaled(&self, t: f64) -> Self {
        let mut m = *self;
        for v in m.data.iter_mut() {
            *v *= t;
        }
        m
    }

    /// `tr(self * other)`.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for j in 0..self.dim {
            for i in 0..=j {
                let p = self.get(i, j) * other.get(i, j);
                s += if i == j { p } else { 2.0 * p };
            }
        }
        s
    }

    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.dim {
            out[i] = (0..self.dim).map(|j| self.get(i, j) * v[j]).sum();
        }
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += v[i] * self.get(i, j) * v[j];
            }
        }
        s
    }

    /// `Uᵀ M U` for a square (not necessarily orthogonal) row-major `u`.
    pub fn congruence(&self, u: &[Vec<f64>]) -> Self {
        let n = self.dim;
        Self::from_fn(n, |a, b| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += u[i][a] * self.get(i, j) * u[j][b];
                }
            }
            s
        })
    }

    /// Sorted eigenvalues (nondecreasing).
    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_sym(self).values
    }
}

impl std::ops::Add for SymMatrix {
    type Output = SymMatrix;
    fn add(mut self, rhs: SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        self
    }
}

impl std::ops::Sub for SymMatrix {
    type Output = SymMatrix;
    fn sub(mut self, rhs: SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        self
    }
}

impl std::ops::Neg for SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self.scaled(-1.0)
    }
}

impl std::ops::AddAssign for SymMatrix {
    fn add_assign(&mut self, rhs: SymMatrix) {
        *self = *self + rhs;
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let m = SymMatrix::from_rows(&rows)
            .ok_or_else(|| serde::de::Error::custom("matrix must be square with dim in 1..=8"))?;
        for i in 0..m.dim {
            for j in 0..i {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(serde::de::Error::custom("matrix is not symmetric"));
                }
            }
        }
        Ok(m)
    }
}

/// Eigen-decomposition `M = Q diag(values) Qᵀ`; `vectors[k]` is the unit
/// eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    /// `Q diag(values) Qᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[k][i] * self.values[k] * self.vectors[k][j])
                .sum()
        })
    }
}

/// Cyclic Jacobi eigensolver; eigenvalues returned in nondecreasing order.
pub fn eig_sym(m: &SymMatrix) -> SymEigen {
    let n = m.dim();
    let mut a = [[0.0f64; MAX_DIM]; MAX_DIM];
    let mut v = [[0.0f64; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = m.get(i, j);
        }
        v[i][i] = 1.0;
    }
    let scale = m.norm();
    if scale > 0.0 && n > 1 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[i][j] * a[i][j];
                }
            }
            if off.sqrt() <= JACOBI_THRESHOLD * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    for k in 0..n {
                        let vkp = v[k][p];
                        let vkq = v[k][q];
                        v[k][p] = c * vkp - s * vkq;
                        v[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    SymEigen {
        values: order.iter().map(|&k| a[k][k]).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|i| v[i][k]).collect())
            .collect(),
    }
}

/// Eigenvalues only, written into `out[..dim]`, sorted. Avoids allocation in
/// the hot operator-evaluation path.
pub fn eigenvalues_into(m: &SymMatrix, out: &mut [f64; MAX_DIM]) -> usize {
    let n = m.dim();
    if n == 2 {
        // closed form; same ordering contract as the Jacobi path
        let (a, b, c) = (m.get(0, 0), m.get(0, 1), m.get(1, 1));
        let mean = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        out[0] = mean - rad;
        out[1] = mean + rad;
        return 2;
    }
    let e = eig_sym(m);
    out[..n].copy_from_slice(&e.values);
    n
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
