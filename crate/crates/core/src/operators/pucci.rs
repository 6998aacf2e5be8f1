//! Pucci extremal operators and a sampling oracle for their sup/inf form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EllipticityParams;
use crate::linalg::{eig_sym, eigenvalues_into, SymMatrix, MAX_DIM};

/// Relative dead-band below which an eigenvalue counts as zero.
const EIGEN_DEAD_BAND: f64 = 1e-14;

/// `P⁺` on a list of eigenvalues.
#[inline]
pub fn pucci_plus_eigs(eigs: &[f64], scale: f64, params: &EllipticityParams) -> f64 {
    let cut = EIGEN_DEAD_BAND * scale;
    eigs.iter()
        .map(|&e| {
            if e > cut {
                -params.lambda * e
            } else if e < -cut {
                -params.big_lambda * e
            } else {
                0.0
            }
        })
        .sum()
}

/// `P⁻` on a list of eigenvalues.
#[inline]
pub fn pucci_minus_eigs(eigs: &[f64], scale: f64, params: &EllipticityParams) -> f64 {
    let cut = EIGEN_DEAD_BAND * scale;
    eigs.iter()
        .map(|&e| {
            if e > cut {
                -params.big_lambda * e
            } else if e < -cut {
                -params.lambda * e
            } else {
                0.0
            }
        })
        .sum()
}

/// `P⁺(M) = -λ Σ_{μ>0} μ - Λ Σ_{μ<0} μ`, the supremum of `-tr(AM)` over
/// `λI ≤ A ≤ ΛI`.
pub fn pucci_plus(m: &SymMatrix, params: &EllipticityParams) -> f64 {
    let mut buf = [0.0; MAX_DIM];
    let n = eigenvalues_into(m, &mut buf);
    pucci_plus_eigs(&buf[..n], m.norm(), params)
}

/// `P⁻(M) = -Λ Σ_{μ>0} μ - λ Σ_{μ<0} μ`, the infimum of `-tr(AM)`.
pub fn pucci_minus(m: &SymMatrix, params: &EllipticityParams) -> f64 {
    let mut buf = [0.0; MAX_DIM];
    let n = eigenvalues_into(m, &mut buf);
    pucci_minus_eigs(&buf[..n], m.norm(), params)
}

/// The coefficient matrix attaining `P⁺(M)`: `Q diag(a) Qᵀ` with `a = λ` on
/// positive eigendirections and `Λ` elsewhere.
pub fn aligned_maximizer(m: &SymMatrix, params: &EllipticityParams) -> SymMatrix {
    let e = eig_sym(m);
    let n = m.dim();
    SymMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| {
                let a = if e.values[k] > 0.0 {
                    params.lambda
                } else {
                    params.big_lambda
                };
                e.vectors[k][i] * a * e.vectors[k][j]
            })
            .sum()
    })
}

/// Random orthogonal matrix (rows) by Gram-Schmidt on uniform vectors.
pub(crate) fn random_orthogonal(dim: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while q.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for u in &q {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= d * ui;
            }
        }
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nv > 1e-6 {
            q.push(v.into_iter().map(|a| a / nv).collect());
        }
    }
    q
}

/// Maximum of `-tr(AM)` over `num_samples` random admissible `A` plus the
/// eigenframe-aligned maximizer. Never exceeds [`pucci_plus`] beyond
/// rounding.
pub fn pucci_oracle(
    m: &SymMatrix,
    params: &EllipticityParams,
    num_samples: usize,
    seed: u64,
) -> f64 {
    let n = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = -aligned_maximizer(m, params).trace_product(m);
    for _ in 0..num_samples {
        let q = random_orthogonal(n, &mut rng);
        let a: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(params.lambda..=params.big_lambda))
            .collect();
        let sample = SymMatrix::from_fn(n, |i, j| (0..n).map(|k| q[k][i] * a[k] * q[k][j]).sum());
        best = best.max(-sample.trace_product(m));
    }
    best
}
