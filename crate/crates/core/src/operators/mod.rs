//! Uniformly elliptic, positively 1-homogeneous, dilation-invariant operators
//! `F(M, p, x)`.
//!
//! Sign convention: `F(M) = -tr(AM) + ...`, so `F(D²u, Du, x) ≥ 0` means `u`
//! is a supersolution. Dual and inverted operators are wrappers that evaluate
//! by formula around their inner operator.

mod inversion;
mod pucci;

pub use inversion::{invert_function_residual, reflection, InversionResidual};
pub use pucci::{
    aligned_maximizer, pucci_minus, pucci_minus_eigs, pucci_oracle, pucci_plus, pucci_plus_eigs,
};
pub(crate) use inversion::fd_jet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigenvalues_into, norm, SymMatrix, MAX_DIM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("dimension mismatch: operator expects {expected}, jet has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evaluation point must be nonzero")]
    ZeroPoint,
    #[error("invalid ellipticity parameters: {0}")]
    InvalidParams(String),
    #[error("invalid Isaacs family: {0}")]
    InvalidFamily(String),
    #[error("finite-difference stencil of radius {step} reaches the origin from |y| = {radius}")]
    StencilHitsOrigin { step: f64, radius: f64 },
    #[error("unsupported dimension {0} (supported 2..=8)")]
    UnsupportedDimension(usize),
}

/// Ellipticity constants `0 < λ ≤ Λ`, drift bound `μ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticityParams {
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    #[serde(default)]
    pub mu: f64,
}

impl EllipticityParams {
    pub fn new(lambda: f64, big_lambda: f64, mu: f64) -> Result<Self, OperatorError> {
        let p = Self {
            lambda,
            big_lambda,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(OperatorError::InvalidParams(format!(
                "lambda = {} must be positive",
                self.lambda
            )));
        }
        if !(self.big_lambda >= self.lambda && self.big_lambda.is_finite()) {
            return Err(OperatorError::InvalidParams(format!(
                "Lambda = {} must be >= lambda = {}",
                self.big_lambda, self.lambda
            )));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(OperatorError::InvalidParams(format!(
                "mu = {} must be nonnegative",
                self.mu
            )));
        }
        Ok(())
    }

    pub const fn laplacian() -> Self {
        Self {
            lambda: 1.0,
            big_lambda: 1.0,
            mu: 0.0,
        }
    }
}

/// Finite inf-sup family `min_i max_j [-tr(A_ij M) + b_ij |x|⁻¹ |p|]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsaacsFamily {
    dim: usize,
    a: Vec<Vec<SymMatrix>>,
    b: Vec<Vec<f64>>,
    params: EllipticityParams,
}

impl IsaacsFamily {
    /// Validates the family against `params` (eigenvalues of every `A_ij` in
    /// `[λ, Λ]`, `0 ≤ b_ij ≤ μ`).
    pub fn new(
        a: Vec<Vec<SymMatrix>>,
        b: Vec<Vec<f64>>,
        params: EllipticityParams,
    ) -> Result<Self, OperatorError> {
        params.validate()?;
        if a.is_empty() || a.iter().any(|row| row.is_empty()) {
            return Err(OperatorError::InvalidFamily("empty index set".into()));
        }
        if a.len() != b.len() || a.iter().zip(&b).any(|(ra, rb)| ra.len() != rb.len()) {
            return Err(OperatorError::InvalidFamily(
                "A and b must have the same shape".into(),
            ));
        }
        let dim = a[0][0].dim();
        let tol = 1e-12 * params.big_lambda;
        for (i, row) in a.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                if m.dim() != dim {
                    return Err(OperatorError::InvalidFamily(format!(
                        "A[{i}][{j}] has dimension {}, expected {dim}",
                        m.dim()
                    )));
                }
                let mut buf = [0.0; MAX_DIM];
                let n = eigenvalues_into(m, &mut buf);
                if buf[0] < params.lambda - tol || buf[n - 1] > params.big_lambda + tol {
                    return Err(OperatorError::InvalidFamily(format!(
                        "eigenvalues of A[{i}][{j}] lie in [{}, {}], outside [{}, {}]",
                        buf[0],
                        buf[n - 1],
                        params.lambda,
                        params.big_lambda
                    )));
                }
                let bij = b[i][j];
                if !(bij >= 0.0 && bij <= params.mu + 1e-12 * (1.0 + params.mu)) {
                    return Err(OperatorError::InvalidFamily(format!(
                        "b[{i}][{j}] = {bij} outside [0, mu = {}]",
                        params.mu
                    )));
                }
            }
        }
        Ok(Self { dim, a, b, params })
    }

    /// Builds a family and infers the tightest `λ, Λ, μ` it satisfies.
    pub fn with_inferred_params(
        a: Vec<Vec<SymMatrix>>,
        b: Vec<Vec<f64>>,
    ) -> Result<Self, OperatorError> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for m in a.iter().flatten() {
            let mut buf = [0.0; MAX_DIM];
            let n = eigenvalues_into(m, &mut buf);
            lo = lo.min(buf[0]);
            hi = hi.max(buf[n - 1]);
        }
        let mu = b.iter().flatten().fold(0.0f64, |acc, &v| acc.max(v));
        Self::new(a, b, EllipticityParams::new(lo, hi, mu)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> EllipticityParams {
        self.params
    }

    pub fn matrices(&self) -> &[Vec<SymMatrix>] {
        &self.a
    }

    pub fn drifts(&self) -> &[Vec<f64>] {
        &self.b
    }

    fn eval(&self, m: &SymMatrix, drift_scale: f64) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row_a, row_b)| {
                row_a
                    .iter()
                    .zip(row_b)
                    .map(|(a, b)| -a.trace_product(m) + b * drift_scale)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn is_scalar(&self) -> bool {
        self.a.iter().flatten().all(|m| {
            let s = m.get(0, 0);
            (0..self.dim).all(|i| {
                (0..self.dim).all(|j| {
                    let want = if i == j { s } else { 0.0 };
                    (m.get(i, j) - want).abs() <= 1e-12 * s.abs().max(1.0)
                })
            })
        })
    }
}

/// How an isotropic operator depends on `|p|`; used to pick the monotone
/// upwind gradient surrogate in the FD scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftMonotonicity {
    None,
    Increasing,
    Decreasing,
    /// Drift coefficients of both signs; no monotone surrogate exists.
    Mixed,
}

/// An operator `F(M, p, x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// `P⁺(M)`.
    PucciPlus(EllipticityParams),
    /// `P⁻(M)`.
    PucciMinus(EllipticityParams),
    /// `P⁺(M) + μ |x|⁻¹ |p|`.
    ExtremalPlus(EllipticityParams),
    /// `P⁻(M) - μ |x|⁻¹ |p|`.
    ExtremalMinus(EllipticityParams),
    /// `-tr M`.
    Laplacian,
    IsaacsFamily(IsaacsFamily),
    /// `F̃(M, p, x) = -F(-M, -p, x)`.
    Dual(Box<OperatorSpec>),
    /// The inversion `F*` through `x ↦ x / |x|²`.
    Inverted(Box<OperatorSpec>),
}

impl OperatorSpec {
    pub fn pucci_plus(lambda: f64, big_lambda: f64) -> Result<Self, OperatorError> {
        Ok(Self::PucciPlus(EllipticityParams::new(lambda, big_lambda, 0.0)?))
    }

    pub fn pucci_minus(lambda: f64, big_lambda: f64) -> Result<Self, OperatorError> {
        Ok(Self::PucciMinus(EllipticityParams::new(lambda, big_lambda, 0.0)?))
    }

    pub fn extremal_plus(lambda: f64, big_lambda: f64, mu: f64) -> Result<Self, OperatorError> {
        Ok(Self::ExtremalPlus(EllipticityParams::new(lambda, big_lambda, mu)?))
    }

    pub fn extremal_minus(lambda: f64, big_lambda: f64, mu: f64) -> Result<Self, OperatorError> {
        Ok(Self::ExtremalMinus(EllipticityParams::new(lambda, big_lambda, mu)?))
    }

    /// Ellipticity constants in dimension `dim`. Inversion keeps `λ, Λ` and
    /// enlarges the drift bound to `2((n-1)Λ - λ) + μ`.
    pub fn ellipticity(&self, dim: usize) -> EllipticityParams {
        match self {
            Self::PucciPlus(p) | Self::PucciMinus(p) => EllipticityParams { mu: 0.0, ..*p },
            Self::ExtremalPlus(p) | Self::ExtremalMinus(p) => *p,
            Self::Laplacian => EllipticityParams::laplacian(),
            Self::IsaacsFamily(f) => f.params,
            Self::Dual(inner) => inner.ellipticity(dim),
            Self::Inverted(inner) => {
                let p = inner.ellipticity(dim);
                EllipticityParams {
                    mu: 2.0 * ((dim as f64 - 1.0) * p.big_lambda - p.lambda) + p.mu,
                    ..p
                }
            }
        }
    }

    /// Dimension required by the operator, if fixed.
    pub fn required_dim(&self) -> Option<usize> {
        match self {
            Self::IsaacsFamily(f) => Some(f.dim),
            Self::Dual(inner) | Self::Inverted(inner) => inner.required_dim(),
            _ => None,
        }
    }

    /// `F(UMUᵀ, Up, Ux) = F(M, p, x)` for all rotations `U`; the condition
    /// under which the homogeneous ansatz reduces to an angular ODE.
    pub fn is_rotation_equivariant(&self) -> bool {
        match self {
            Self::IsaacsFamily(f) => f.is_scalar(),
            Self::Dual(inner) | Self::Inverted(inner) => inner.is_rotation_equivariant(),
            _ => true,
        }
    }

    /// Depends on `M` only through its eigenvalues and on `(p, x)` only
    /// through `|p|, |x|`. Required by the wide-stencil FD scheme.
    pub fn is_isotropic(&self) -> bool {
        match self {
            Self::IsaacsFamily(f) => f.is_scalar(),
            Self::Dual(inner) => inner.is_isotropic(),
            Self::Inverted(_) => false,
            _ => true,
        }
    }

    pub fn drift_monotonicity(&self) -> DriftMonotonicity {
        use DriftMonotonicity::*;
        match self {
            Self::PucciPlus(_) | Self::PucciMinus(_) | Self::Laplacian => None,
            Self::ExtremalPlus(p) if p.mu > 0.0 => Increasing,
            Self::ExtremalMinus(p) if p.mu > 0.0 => Decreasing,
            Self::ExtremalPlus(_) | Self::ExtremalMinus(_) => None,
            Self::IsaacsFamily(f) => {
                let pos = f.b.iter().flatten().any(|&b| b > 0.0);
                let neg = f.b.iter().flatten().any(|&b| b < 0.0);
                match (pos, neg) {
                    (true, true) => Mixed,
                    (true, false) => Increasing,
                    (false, true) => Decreasing,
                    (false, false) => None,
                }
            }
            Self::Dual(inner) => match inner.drift_monotonicity() {
                Increasing => Decreasing,
                Decreasing => Increasing,
                other => other,
            },
            // anisotropic in p; not used by the FD scheme
            Self::Inverted(_) => None,
        }
    }

    /// `F̃(M, p, x) = -F(-M, -p, x)`.
    pub fn dual(&self) -> Self {
        Self::Dual(Box::new(self.clone()))
    }

    /// The inverted operator `F*`.
    pub fn invert(&self) -> Self {
        Self::Inverted(Box::new(self.clone()))
    }

    /// Evaluates `F(M, p, x)`.
    pub fn eval(&self, jet: &Jet) -> Result<f64, OperatorError> {
        self.evaluate(&jet.m, &jet.p, &jet.x)
    }

    /// Evaluates `F(M, p, x)` on borrowed parts.
    pub fn evaluate(&self, m: &SymMatrix, p: &[f64], x: &[f64]) -> Result<f64, OperatorError> {
        let n = m.dim();
        if p.len() != n || x.len() != n {
            return Err(OperatorError::DimensionMismatch {
                expected: n,
                got: if p.len() != n { p.len() } else { x.len() },
            });
        }
        if let Some(d) = self.required_dim() {
            if d != n {
                return Err(OperatorError::DimensionMismatch {
                    expected: d,
                    got: n,
                });
            }
        }
        let r = norm(x);
        if r == 0.0 {
            return Err(OperatorError::ZeroPoint);
        }
        Ok(self.eval_unchecked(m, p, x, r))
    }

    pub(crate) fn eval_unchecked(&self, m: &SymMatrix, p: &[f64], x: &[f64], r: f64) -> f64 {
        match self {
            Self::PucciPlus(params) => pucci_plus(m, params),
            Self::PucciMinus(params) => pucci_minus(m, params),
            Self::ExtremalPlus(params) => pucci_plus(m, params) + params.mu * norm(p) / r,
            Self::ExtremalMinus(params) => pucci_minus(m, params) - params.mu * norm(p) / r,
            Self::Laplacian => -m.trace(),
            Self::IsaacsFamily(f) => f.eval(m, norm(p) / r),
            Self::Dual(inner) => {
                let n = p.len();
                let mut neg_p = [0.0; MAX_DIM];
                for i in 0..n {
                    neg_p[i] = -p[i];
                }
                -inner.eval_unchecked(&(-*m), &neg_p[..n], x, r)
            }
            Self::Inverted(inner) => inversion::eval_inverted(inner, m, p, x, r),
        }
    }

    /// Evaluates an isotropic operator on eigenvalues `(μ_1, ..., μ_n)` and
    /// gradient norm; the FD scheme's entry point.
    pub fn eval_isotropic(&self, eigs: &[f64], grad_norm: f64, radius: f64) -> f64 {
        let n = eigs.len();
        let m = SymMatrix::diag(eigs);
        let mut p = [0.0; MAX_DIM];
        p[0] = grad_norm;
        let mut x = [0.0; MAX_DIM];
        x[n - 1] = radius;
        self.eval_unchecked(&m, &p[..n], &x[..n], radius)
    }
}

/// Argument triple `(M, p, x)` with `|x| > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub m: SymMatrix,
    pub p: Vec<f64>,
    pub x: Vec<f64>,
}

impl Jet {
    pub fn new(m: SymMatrix, p: Vec<f64>, x: Vec<f64>) -> Result<Self, OperatorError> {
        let n = m.dim();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(OperatorError::UnsupportedDimension(n));
        }
        if p.len() != n || x.len() != n {
            return Err(OperatorError::DimensionMismatch {
                expected: n,
                got: if p.len() != n { p.len() } else { x.len() },
            });
        }
        if norm(&x) == 0.0 {
            return Err(OperatorError::ZeroPoint);
        }
        Ok(Self { m, p, x })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// `(-M, -p, x)`.
    pub fn negated(&self) -> Self {
        Self {
            m: -self.m,
            p: self.p.iter().map(|v| -v).collect(),
            x: self.x.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON representation

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OperatorJson {
    variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(rename = "Lambda", skip_serializing_if = "Option::is_none")]
    big_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Vec<SymMatrix>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner: Option<Box<OperatorJson>>,
}

impl OperatorJson {
    fn plain(variant: &str, p: Option<EllipticityParams>) -> Self {
        Self {
            variant: variant.to_string(),
            lambda: p.map(|p| p.lambda),
            big_lambda: p.map(|p| p.big_lambda),
            mu: p.map(|p| p.mu),
            a: None,
            b: None,
            inner: None,
        }
    }

    fn params(&self) -> Result<EllipticityParams, OperatorError> {
        let get = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| OperatorError::InvalidParams(format!("missing field `{name}`")))
        };
        EllipticityParams::new(
            get(self.lambda, "lambda")?,
            get(self.big_lambda, "Lambda")?,
            self.mu.unwrap_or(0.0),
        )
    }
}

impl From<&OperatorSpec> for OperatorJson {
    fn from(spec: &OperatorSpec) -> Self {
        match spec {
            OperatorSpec::PucciPlus(p) => Self::plain("pucci-plus", Some(*p)),
            OperatorSpec::PucciMinus(p) => Self::plain("pucci-minus", Some(*p)),
            OperatorSpec::ExtremalPlus(p) => Self::plain("extremal-plus", Some(*p)),
            OperatorSpec::ExtremalMinus(p) => Self::plain("extremal-minus", Some(*p)),
            OperatorSpec::Laplacian => Self::plain("laplacian", None),
            OperatorSpec::IsaacsFamily(f) => Self {
                a: Some(f.a.clone()),
                b: Some(f.b.clone()),
                ..Self::plain("isaacs", Some(f.params))
            },
            OperatorSpec::Dual(inner) => Self {
                inner: Some(Box::new(Self::from(inner.as_ref()))),
                ..Self::plain("dual", None)
            },
            OperatorSpec::Inverted(inner) => Self {
                inner: Some(Box::new(Self::from(inner.as_ref()))),
                ..Self::plain("inverted", None)
            },
        }
    }
}

impl TryFrom<&OperatorJson> for OperatorSpec {
    type Error = OperatorError;

    fn try_from(j: &OperatorJson) -> Result<Self, OperatorError> {
        let inner = || {
            j.inner
                .as_deref()
                .ok_or_else(|| OperatorError::InvalidParams("missing field `inner`".into()))
                .and_then(OperatorSpec::try_from)
                .map(Box::new)
        };
        Ok(match j.variant.as_str() {
            "pucci-plus" => Self::PucciPlus(j.params()?),
            "pucci-minus" => Self::PucciMinus(j.params()?),
            "extremal-plus" => Self::ExtremalPlus(j.params()?),
            "extremal-minus" => Self::ExtremalMinus(j.params()?),
            "laplacian" => Self::Laplacian,
            "isaacs" => {
                let a = j
                    .a
                    .clone()
                    .ok_or_else(|| OperatorError::InvalidFamily("missing field `A`".into()))?;
                let b = j
                    .b
                    .clone()
                    .ok_or_else(|| OperatorError::InvalidFamily("missing field `b`".into()))?;
                let family = if j.lambda.is_some() || j.big_lambda.is_some() {
                    IsaacsFamily::new(a, b, j.params()?)?
                } else {
                    IsaacsFamily::with_inferred_params(a, b)?
                };
                Self::IsaacsFamily(family)
            }
            "dual" => Self::Dual(inner()?),
            "inverted" => Self::Inverted(inner()?),
            other => {
                return Err(OperatorError::InvalidParams(format!(
                    "unknown operator variant `{other}`"
                )))
            }
        })
    }
}

impl Serialize for OperatorSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OperatorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        OperatorSpec::try_from(&j).map_err(serde::de::Error::custom)
    }
}
