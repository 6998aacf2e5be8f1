//! Explicit barriers for `α⁺`, the bounds they imply, and sampling checks of
//! their differential inequalities.

mod bounds;
mod functions;

pub use bounds::{
    admissible_sigma, bounds_report, lower_bound, lower_bound_with_sigma, tupa1_threshold,
    tupa2_threshold, upper_bound, upper_bound_formula, BoundsReport, LowerBound, UpperBound,
};
pub use functions::{subsolution_eval, supersolution_eval, BarrierSample};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::ConeError;
use crate::linalg::norm;
use crate::operators::{pucci_minus, pucci_plus, EllipticityParams, OperatorError};

/// Width of the boundary collar excluded from subsolution samples.
pub const SUB_COLLAR: f64 = 1e-3;
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BarrierError {
    #[error("barrier evaluated at the origin")]
    ZeroPoint,
    #[error("sigma = {0} outside (-1, 1)")]
    InvalidSigma(f64),
    #[error("admissible sigma range [{lo}, {hi}] is empty")]
    EmptySigmaRange { lo: f64, hi: f64 },
    #[error("num_samples must be positive")]
    NoSamples,
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// Deterministic sampling of the unit-sphere slice, stratified in the axial
/// coordinate `t = x_n / |x|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub num_samples: usize,
    pub seed: u64,
    /// Radius of the sampled sphere; the checks are homogeneous in it.
    pub radius: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            num_samples: 10_000,
            seed: DEFAULT_SEED,
            radius: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupersolutionReport {
    pub min_residual: f64,
    pub witness: Vec<f64>,
    pub num_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsolutionReport {
    pub max_residual: f64,
    pub witness: Vec<f64>,
    pub num_samples: usize,
}

/// Points with `t` stratified in `(t_lo, t_hi)` and the transverse direction
/// uniform on the sphere `S^{n-2}`.
pub fn stratified_points(dim: usize, t_lo: f64, t_hi: f64, cfg: &SampleConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.num_samples;
    (0..n)
        .map(|i| {
            let t = t_lo + (t_hi - t_lo) * (i as f64 + rng.gen::<f64>()) / n as f64;
            let t = t.clamp(-1.0, 1.0);
            let transverse = loop {
                let v: Vec<f64> = (0..dim - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let nv = norm(&v);
                if nv > 1e-3 && nv <= 1.0 {
                    break v.into_iter().map(|c| c / nv).collect::<Vec<f64>>();
                }
            };
            let s = (1.0 - t * t).max(0.0).sqrt();
            let mut x: Vec<f64> = transverse.iter().map(|c| cfg.radius * s * c).collect();
            x.push(cfg.radius * t);
            x
        })
        .collect()
}

/// `P⁻(D²v) - μ|x|⁻¹|Dv|` for the supersolution.
pub fn supersolution_residual(
    params: &EllipticityParams,
    x: &[f64],
    alpha: f64,
    kappa: f64,
) -> Result<f64, BarrierError> {
    let s = supersolution_eval(x, alpha, kappa)?;
    Ok(pucci_minus(&s.hessian, params) - params.mu * norm(&s.gradient) / norm(x))
}

/// `P⁺(D²φ) + μ|x|⁻¹|Dφ|` for the subsolution.
pub fn subsolution_residual(
    params: &EllipticityParams,
    x: &[f64],
    alpha: f64,
    sigma: f64,
) -> Result<f64, BarrierError> {
    let s = subsolution_eval(x, alpha, sigma)?;
    Ok(pucci_plus(&s.hessian, params) + params.mu * norm(&s.gradient) / norm(x))
}

fn residuals(
    points: &[Vec<f64>],
    f: impl Fn(&[f64]) -> Result<f64, BarrierError> + Sync,
) -> Result<Vec<f64>, BarrierError> {
    points.par_iter().map(|x| f(x)).collect()
}

/// Minimum of the supersolution residual over samples of `{x_n < σ|x|}`.
pub fn verify_supersolution(
    params: &EllipticityParams,
    alpha: f64,
    kappa: f64,
    sigma: f64,
    dim: usize,
    cfg: &SampleConfig,
) -> Result<SupersolutionReport, BarrierError> {
    params.validate()?;
    if cfg.num_samples == 0 {
        return Err(BarrierError::NoSamples);
    }
    if !(sigma > -1.0 && sigma < 1.0) {
        return Err(BarrierError::InvalidSigma(sigma));
    }
    let points = stratified_points(dim, -1.0, sigma, cfg);
    let values = residuals(&points, |x| supersolution_residual(params, x, alpha, kappa))?;
    let (k, &min) = values
        .iter()
        .enumerate()
        .fold((0, &values[0]), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(SupersolutionReport {
        min_residual: min,
        witness: points[k].clone(),
        num_samples: cfg.num_samples,
    })
}

/// Maximum of the subsolution residual over samples of
/// `{x_n > (σ + collar)|x|}`.
pub fn verify_subsolution(
    params: &EllipticityParams,
    alpha: f64,
    sigma: f64,
    dim: usize,
    cfg: &SampleConfig,
) -> Result<SubsolutionReport, BarrierError> {
    params.validate()?;
    if cfg.num_samples == 0 {
        return Err(BarrierError::NoSamples);
    }
    if !(sigma > -1.0 && sigma < 1.0 - SUB_COLLAR) {
        return Err(BarrierError::InvalidSigma(sigma));
    }
    let points = stratified_points(dim, sigma + SUB_COLLAR, 1.0, cfg);
    let values = residuals(&points, |x| subsolution_residual(params, x, alpha, sigma))?;
    let (k, &max) = values
        .iter()
        .enumerate()
        .fold((0, &values[0]), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(SubsolutionReport {
        max_residual: max,
        witness: points[k].clone(),
        num_samples: cfg.num_samples,
    })
}

/// An `α` satisfying both subsolution requirements at `σ`: the midpoint
/// `tupa1 + tupa2`, which is half the upper bound at that `σ`.
pub fn admissible_sub_alpha(params: &EllipticityParams, dim: usize, sigma: f64) -> f64 {
    tupa1_threshold(params, dim) + tupa2_threshold(params.lambda, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::ConeSpec;
    use crate::operators::pucci_minus_eigs;

    fn p() -> EllipticityParams {
        EllipticityParams::new(1.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn stratified_points_are_on_slice() {
        let cfg = SampleConfig {
            num_samples: 200,
            ..Default::default()
        };
        for x in stratified_points(3, -1.0, 0.2, &cfg) {
            assert!((norm(&x) - 1.0).abs() < 1e-12);
            assert!(x[2] < 0.2 + 1e-12);
        }
    }

    #[test]
    fn supersolution_holds_at_constants() {
        let cone = ConeSpec::new(2, std::f64::consts::FRAC_PI_2).unwrap();
        let lb = lower_bound(&p(), &cone).unwrap();
        let cfg = SampleConfig {
            num_samples: 2000,
            ..Default::default()
        };
        let rep = verify_supersolution(&p(), lb.alpha_lb, lb.kappa, lb.sigma_lb, 2, &cfg).unwrap();
        assert!(rep.min_residual >= -1e-12, "{rep:?}");
    }

    #[test]
    fn large_alpha_breaks_supersolution() {
        let cone = ConeSpec::new(2, std::f64::consts::FRAC_PI_2).unwrap();
        let lb = lower_bound(&p(), &cone).unwrap();
        let cfg = SampleConfig {
            num_samples: 2000,
            ..Default::default()
        };
        let rep = verify_supersolution(&p(), 10.0, lb.kappa, lb.sigma_lb, 2, &cfg).unwrap();
        assert!(rep.min_residual < 0.0);
    }

    #[test]
    fn subsolution_strict_inside() {
        let cone = ConeSpec::new(3, 1.0).unwrap();
        let ub = upper_bound(&p(), &cone).unwrap();
        let alpha = admissible_sub_alpha(&p(), 3, ub.sigma_ub);
        assert!((2.0 * alpha - ub.alpha_ub).abs() < 1e-9 * ub.alpha_ub);
        let cfg = SampleConfig {
            num_samples: 2000,
            ..Default::default()
        };
        let rep = verify_subsolution(&p(), alpha, ub.sigma_ub, 3, &cfg).unwrap();
        assert!(rep.max_residual < 0.0, "{rep:?}");
    }

    #[test]
    fn laplacian_residual_two_ways() {
        let lap = EllipticityParams::new(1.0, 1.0, 0.3).unwrap();
        let x = [0.2, -0.5, -0.4];
        let s = supersolution_eval(&x, 0.4, 2.0).unwrap();
        let via_trace = -s.hessian.trace() - 0.3 * norm(&s.gradient) / norm(&x);
        let eigs = s.hessian.eigenvalues();
        let via_eigs = pucci_minus_eigs(&eigs, 0.0, &lap) - 0.3 * norm(&s.gradient) / norm(&x);
        let direct = supersolution_residual(&lap, &x, 0.4, 2.0).unwrap();
        assert!((via_trace - direct).abs() < 1e-10);
        assert!((via_eigs - direct).abs() < 1e-10);
    }

    #[test]
    fn radius_invariance_of_sign() {
        let cone = ConeSpec::new(2, 2.0).unwrap();
        let lb = lower_bound(&p(), &cone).unwrap();
        let mk = |radius| SampleConfig {
            num_samples: 500,
            radius,
            ..Default::default()
        };
        let a = verify_supersolution(&p(), lb.alpha_lb, lb.kappa, lb.sigma_lb, 2, &mk(1.0)).unwrap();
        let b = verify_supersolution(&p(), lb.alpha_lb, lb.kappa, lb.sigma_lb, 2, &mk(3.0)).unwrap();
        let scale = 3.0f64.powf(-lb.alpha_lb - 2.0);
        assert!((b.min_residual - scale * a.min_residual).abs() <= 1e-9 * a.min_residual.abs());
    }
}
