//! Closed-form lower and upper bounds on `α⁺`.

use serde::{Deserialize, Serialize};

use super::BarrierError;
use crate::cone::ConeSpec;
use crate::numeric::golden_section_min;
use crate::operators::EllipticityParams;

/// Points in the pre-scan guarding the golden-section search on `σ`.
const SIGMA_PRESCAN: usize = 64;
const SIGMA_TOL: f64 = 1e-10;
/// Margin keeping `σ` away from the singular endpoints `0` and `1`.
const SIGMA_MARGIN: f64 = 1e-9;

/// Constants of the supersolution construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub kappa: f64,
    pub alpha_lb: f64,
    pub sigma_lb: f64,
}

/// Constants of the subsolution construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub alpha_ub: f64,
    pub sigma_ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub kappa: f64,
    pub alpha_lb: f64,
    pub alpha_ub: f64,
    pub sigma_lb: f64,
    pub sigma_ub: f64,
}

/// `C1, C2, κ, α` for the supersolution in `{x_n < σ|x|}`, dimension `n`.
pub fn lower_bound_with_sigma(
    params: &EllipticityParams,
    n: usize,
    sigma: f64,
) -> Result<LowerBound, BarrierError> {
    params.validate()?;
    if !(sigma > -1.0 && sigma < 1.0) {
        return Err(BarrierError::InvalidSigma(sigma));
    }
    let (l, big_l, mu) = (params.lambda, params.big_lambda, params.mu);
    let nf = n as f64;
    let c1 = (2.0 * big_l + mu - l * (nf - 1.0)).max(0.0);
    let c2 = (2.0 * big_l + mu).powi(2) / (2.0 * l);
    let kappa = 1.0
        + c2
        + (2.0 * big_l * (nf - 1.0) + 1.0) / (l * (1.0 - sigma * sigma))
        + 4.0 * (c2 + 1.0) / l;
    let alpha_lb = if c1 == 0.0 {
        1.0
    } else {
        ((-2.0 * kappa).exp() / c1).min(1.0)
    };
    Ok(LowerBound {
        c1,
        c2,
        kappa,
        alpha_lb,
        sigma_lb: sigma,
    })
}

/// Lower bound for the cone: the cone lies in `{x·ξ < σ|x|}` with `ξ` the
/// reversed axis and `σ = -cos θ₀`.
pub fn lower_bound(params: &EllipticityParams, cone: &ConeSpec) -> Result<LowerBound, BarrierError> {
    cone.validate()?;
    lower_bound_with_sigma(params, cone.dim, -cone.theta0.cos())
}

/// The upper-bound formula at a fixed inscribed cap `{x_n > σ|x|}`.
pub fn upper_bound_formula(params: &EllipticityParams, n: usize, sigma: f64) -> f64 {
    2.0 * tupa1_threshold(params, n) + (params.lambda + sigma.powi(4)) / (sigma * sigma * (1.0 - sigma * sigma))
}

/// Smallest `α` allowed by the first subsolution requirement.
pub fn tupa1_threshold(params: &EllipticityParams, n: usize) -> f64 {
    let (l, big_l, mu) = (params.lambda, params.big_lambda, params.mu);
    let nf = n as f64;
    1.0 + (mu + (nf - 1.0) * big_l + nf * nf * big_l * big_l / l + 0.5 * (2.0 * big_l + mu).powi(2) / l)
        / (2.0 * l)
}

/// Strict lower threshold on `α` from the second subsolution requirement.
pub fn tupa2_threshold(lambda: f64, sigma: f64) -> f64 {
    (lambda + sigma.powi(4)) / (2.0 * sigma * sigma * (1.0 - sigma * sigma))
}

/// Admissible `σ` range for caps inscribed in the cone.
pub fn admissible_sigma(cone: &ConeSpec) -> (f64, f64) {
    (cone.theta0.cos().max(SIGMA_MARGIN), 1.0 - SIGMA_MARGIN)
}

/// Minimizes the upper-bound formula over inscribed caps.
pub fn upper_bound(params: &EllipticityParams, cone: &ConeSpec) -> Result<UpperBound, BarrierError> {
    params.validate()?;
    cone.validate()?;
    let (lo, hi) = admissible_sigma(cone);
    if !(lo < hi) {
        return Err(BarrierError::EmptySigmaRange { lo, hi });
    }
    let f = |s: f64| upper_bound_formula(params, cone.dim, s);
    let grid: Vec<f64> = (0..SIGMA_PRESCAN)
        .map(|i| lo + (hi - lo) * i as f64 / (SIGMA_PRESCAN - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&s| f(s)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v < values[b] { i } else { b });
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(SIGMA_PRESCAN - 1)];
    let (mut sigma, mut value) = golden_section_min(f, a, b, SIGMA_TOL);
    // endpoints are admissible and may beat the interior search
    for s in [a, b] {
        if f(s) < value {
            sigma = s;
            value = f(s);
        }
    }
    Ok(UpperBound {
        alpha_ub: value,
        sigma_ub: sigma,
    })
}

pub fn bounds_report(params: &EllipticityParams, cone: &ConeSpec) -> Result<BoundsReport, BarrierError> {
    let lb = lower_bound(params, cone)?;
    let ub = upper_bound(params, cone)?;
    Ok(BoundsReport {
        c1: lb.c1,
        c2: lb.c2,
        kappa: lb.kappa,
        alpha_lb: lb.alpha_lb,
        alpha_ub: ub.alpha_ub,
        sigma_lb: lb.sigma_lb,
        sigma_ub: ub.sigma_ub,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_2};

    #[test]
    fn worked_lower_bound() {
        let p = EllipticityParams::new(1.0, 2.0, 0.0).unwrap();
        let lb = lower_bound_with_sigma(&p, 2, 0.0).unwrap();
        assert_eq!(lb.c1, 3.0);
        assert_eq!(lb.c2, 8.0);
        assert_eq!(lb.kappa, 50.0);
        assert_eq!(lb.alpha_lb, (-100.0f64).exp() / 3.0);
        // σ = -cos(π/2) is zero up to rounding
        let cone = ConeSpec::new(2, FRAC_PI_2).unwrap();
        assert!((lower_bound(&p, &cone).unwrap().kappa - 50.0).abs() < 1e-12);
    }

    #[test]
    fn c1_cases() {
        let lap = EllipticityParams::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(lower_bound_with_sigma(&lap, 2, 0.0).unwrap().c1, 1.0);
        let lb = lower_bound_with_sigma(&lap, 4, 0.0).unwrap();
        assert_eq!(lb.c1, 0.0);
        assert_eq!(lb.alpha_lb, 1.0);
    }

    #[test]
    fn fixed_sigma_upper_formula() {
        let lap = EllipticityParams::new(1.0, 1.0, 0.0).unwrap();
        // 2 + (0 + 1 + 4 + 2) + (1 + 1/16) / (3/16)
        let v = upper_bound_formula(&lap, 2, 0.5);
        assert!((v - (9.0 + 17.0 / 3.0)).abs() < 1e-13);
        let cone = ConeSpec::new(2, FRAC_PI_3).unwrap();
        let ub = upper_bound(&lap, &cone).unwrap();
        assert!(ub.alpha_ub <= v + 1e-12);
        assert!(ub.alpha_ub >= 1.5);
        assert!(ub.sigma_ub >= 0.5 - 1e-12);
    }

    #[test]
    fn obtuse_cones_have_bounds() {
        let p = EllipticityParams::new(1.0, 2.0, 1.0).unwrap();
        let cone = ConeSpec::new(3, 2.5).unwrap();
        let ub = upper_bound(&p, &cone).unwrap();
        assert!(ub.alpha_ub.is_finite() && ub.sigma_ub > 0.0 && ub.sigma_ub < 1.0);
    }
}
