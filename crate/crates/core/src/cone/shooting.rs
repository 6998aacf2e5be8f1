//! Shooting on `α` so that the first zero of `φ` lands on `θ₀`.

use serde::Serialize;

use super::profile::{integrate_unchecked, validate_inputs, ProfileSolution};
use super::{Branch, ConeError, ConeSpec, ShootingConfig};
use crate::barriers::bounds_report;
use crate::operators::OperatorSpec;

/// Uniform `|α|` samples used when `θ*(α)` turns out not to be monotone.
const FALLBACK_SCAN: usize = 256;
const DOUBLING_START: (f64, f64) = (1e-3, 1.0);
const DOUBLING_MAX: f64 = 1.099_511_627_776e12; // 2^40
const SHRINK_MIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootResult {
    pub alpha: f64,
    pub branch: Branch,
    pub theta0: f64,
    pub iterations: usize,
    /// `θ*(α) - θ₀` at the returned `α`.
    pub theta_star_residual: Option<f64>,
    /// True when the monotone search failed and the scan fallback was used.
    pub scan_fallback: bool,
    #[serde(skip)]
    pub profile: ProfileSolution,
}

/// Signed miss `θ*(β) - θ₀` as a function of `β = |α|`; `+∞` when `φ` has
/// no zero before the end of integration. Decreasing in `β` when the
/// exponent is unique.
struct Objective<'a> {
    spec: &'a OperatorSpec,
    cone: &'a ConeSpec,
    config: &'a ShootingConfig,
    sign: f64,
    table: Vec<(f64, Option<f64>)>,
}

impl Objective<'_> {
    fn eval(&mut self, beta: f64) -> Result<f64, ConeError> {
        let prof = integrate_unchecked(self.spec, self.cone, self.sign * beta, self.config)?;
        self.table.push((self.sign * beta, prof.theta_star));
        Ok(prof.theta_star.map_or(f64::INFINITY, |t| t - self.cone.theta0))
    }

    fn sorted_table(&self) -> Vec<(f64, Option<f64>)> {
        let mut t = self.table.clone();
        t.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
        t
    }

    /// Whether recorded `θ*` values are nonincreasing in `|α|`.
    fn is_monotone(&self) -> bool {
        let t = self.sorted_table();
        t.windows(2).all(|w| {
            let a = w[0].1.unwrap_or(f64::INFINITY);
            let b = w[1].1.unwrap_or(f64::INFINITY);
            b <= a
        })
    }
}

fn default_bracket(spec: &OperatorSpec, cone: &ConeSpec, branch: Branch) -> (f64, f64) {
    if branch == Branch::Plus {
        if let OperatorSpec::ExtremalPlus(p)
        | OperatorSpec::ExtremalMinus(p)
        | OperatorSpec::PucciPlus(p)
        | OperatorSpec::PucciMinus(p) = spec
        {
            if let Ok(b) = bounds_report(p, cone) {
                if b.alpha_lb > 0.0 && b.alpha_ub > b.alpha_lb {
                    return (b.alpha_lb, b.alpha_ub);
                }
            }
        }
    }
    DOUBLING_START
}

/// Finds `α` (of the sign given by `branch`) whose profile first vanishes at
/// `θ₀`.
pub fn shoot(
    spec: &OperatorSpec,
    cone: &ConeSpec,
    branch: Branch,
    config: &ShootingConfig,
) -> Result<ShootResult, ConeError> {
    validate_inputs(spec, cone, config)?;
    let mut obj = Objective {
        spec,
        cone,
        config,
        sign: branch.sign(),
        table: Vec::new(),
    };
    let (mut a, mut b) = config
        .alpha_bracket
        .unwrap_or_else(|| default_bracket(spec, cone, branch));
    let mut ka = obj.eval(a)?;
    let mut kb = obj.eval(b)?;
    while kb > 0.0 {
        a = b;
        ka = kb;
        b *= 2.0;
        if b > DOUBLING_MAX {
            return Err(ConeError::NoStraddle {
                table: obj.sorted_table(),
            });
        }
        kb = obj.eval(b)?;
    }
    while ka < 0.0 {
        b = a;
        kb = ka;
        a *= 0.5;
        if a < SHRINK_MIN {
            return Err(ConeError::NoStraddle {
                table: obj.sorted_table(),
            });
        }
        ka = obj.eval(a)?;
    }

    let mut iterations = 0;
    let mut scan_fallback = false;
    let beta = match bracket_search(&mut obj, a, b, ka, kb, &mut iterations)? {
        Some(beta) => beta,
        None => {
            scan_fallback = true;
            scan_then_bisect(&mut obj, a, b, &mut iterations)?
        }
    };
    let alpha = obj.sign * beta;
    let profile = integrate_unchecked(spec, cone, alpha, config)?;
    Ok(ShootResult {
        alpha,
        branch,
        theta0: cone.theta0,
        iterations,
        theta_star_residual: profile.theta_star.map(|t| t - cone.theta0),
        scan_fallback,
        profile,
    })
}

/// Illinois regula falsi with geometric bisection while an endpoint is
/// infinite or the bracket spans more than a factor of four. Returns `None`
/// when a non-monotone sample is seen.
fn bracket_search(
    obj: &mut Objective,
    mut a: f64,
    mut b: f64,
    mut ka: f64,
    mut kb: f64,
    iterations: &mut usize,
) -> Result<Option<f64>, ConeError> {
    if ka == 0.0 {
        return Ok(Some(a));
    }
    if kb == 0.0 {
        return Ok(Some(b));
    }
    let (mut wa, mut wb) = (ka, kb);
    let mut last_side = 0i8;
    let tol = obj.config.tol_alpha;
    while b - a > tol {
        if *iterations >= obj.config.max_bisections {
            break;
        }
        *iterations += 1;
        let m = if !ka.is_finite() || b > 4.0 * a {
            if b > 4.0 * a {
                (a * b).sqrt()
            } else {
                0.5 * (a + b)
            }
        } else {
            let x = a + wa * (b - a) / (wa - wb);
            let guard = 1e-3 * (b - a);
            x.clamp(a + guard, b - guard)
        };
        let km = obj.eval(m)?;
        if km > ka || km < kb || km.is_nan() {
            return Ok(None);
        }
        if km.abs() <= 1e-3 * tol {
            return Ok(Some(m));
        }
        if km > 0.0 {
            a = m;
            ka = km;
            wa = km;
            if last_side == 1 {
                wb *= 0.5;
            }
            last_side = 1;
        } else {
            b = m;
            kb = km;
            wb = km;
            if last_side == -1 {
                wa *= 0.5;
            }
            last_side = -1;
        }
    }
    if !obj.is_monotone() {
        return Ok(None);
    }
    Ok(Some(if ka.is_finite() && ka.abs() < kb.abs() { a } else { b }))
}

/// Uniform scan of the bracket followed by bisection on the first crossing.
fn scan_then_bisect(
    obj: &mut Objective,
    a: f64,
    b: f64,
    iterations: &mut usize,
) -> Result<f64, ConeError> {
    let grid: Vec<f64> = (0..FALLBACK_SCAN)
        .map(|i| a + (b - a) * i as f64 / (FALLBACK_SCAN - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(FALLBACK_SCAN);
    for &g in &grid {
        values.push(obj.eval(g)?);
    }
    let Some(k) = values.windows(2).position(|w| w[0] > 0.0 && w[1] <= 0.0) else {
        return Err(ConeError::NonMonotone {
            table: obj.sorted_table(),
        });
    };
    let (mut lo, mut hi) = (grid[k], grid[k + 1]);
    while hi - lo > obj.config.tol_alpha && *iterations < obj.config.max_bisections {
        *iterations += 1;
        let m = 0.5 * (lo + hi);
        if obj.eval(m)? > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `α⁻(F) = -α⁺(F*)`: the negative exponent from the positive exponent of
/// the inverted operator.
pub fn alpha_minus_via_inversion(
    spec: &OperatorSpec,
    cone: &ConeSpec,
    config: &ShootingConfig,
) -> Result<f64, ConeError> {
    Ok(-shoot(&spec.invert(), cone, Branch::Plus, config)?.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn laplacian_sector() {
        let cone = ConeSpec::new(2, FRAC_PI_4).unwrap();
        let cfg = ShootingConfig::default();
        let plus = shoot(&OperatorSpec::Laplacian, &cone, Branch::Plus, &cfg).unwrap();
        assert!((plus.alpha - 2.0).abs() < 1e-6, "{}", plus.alpha);
        let minus = shoot(&OperatorSpec::Laplacian, &cone, Branch::Minus, &cfg).unwrap();
        assert!((minus.alpha + 2.0).abs() < 1e-6, "{}", minus.alpha);
        let inv = alpha_minus_via_inversion(&OperatorSpec::Laplacian, &cone, &cfg).unwrap();
        assert!((inv + 2.0).abs() < 1e-6, "{inv}");
    }

    #[test]
    fn laplacian_half_space_3d() {
        let cone = ConeSpec::new(3, FRAC_PI_2).unwrap();
        let cfg = ShootingConfig::default();
        let plus = shoot(&OperatorSpec::Laplacian, &cone, Branch::Plus, &cfg).unwrap();
        assert!((plus.alpha - 2.0).abs() < 1e-6, "{}", plus.alpha);
        let minus = shoot(&OperatorSpec::Laplacian, &cone, Branch::Minus, &cfg).unwrap();
        assert!((minus.alpha + 1.0).abs() < 1e-6, "{}", minus.alpha);
    }

    #[test]
    fn explicit_bracket_that_misses_is_reported() {
        let cone = ConeSpec::new(2, PI / 3.0).unwrap();
        let cfg = ShootingConfig {
            alpha_bracket: Some((0.1, 0.2)),
            ..Default::default()
        };
        // doubling recovers the straddle
        let r = shoot(&OperatorSpec::Laplacian, &cone, Branch::Plus, &cfg).unwrap();
        assert!((r.alpha - 1.5).abs() < 1e-6);
    }
}
