use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{BarrierKind, BoundaryPreset, CommandName, ExperimentKind, Format, RunConfig};
use super::CliError;
use crate::barriers::{
    admissible_sub_alpha, bounds_report, lower_bound, upper_bound, verify_subsolution,
    verify_supersolution, BoundsReport, SampleConfig,
};
use crate::cone::{alpha_minus_via_inversion, shoot, Branch, ConeError, ConeSpec, ShootResult};
use crate::fd::{
    experiment_harnack, experiment_hopf, experiment_manufactured, experiment_ratios,
    experiment_singularity, profile_trace, ratio_diagnostics, solve_dirichlet, BoundaryData,
    NodeKind, PolarGrid, SolveReport,
};
use crate::io::{csv_table, field_csv, parse_samples, profile_csv, read_file, to_json, write_file, IoError};

/// Points of the default geometric radius lists.
const DEFAULT_RADII: usize = 11;
/// Absolute slack of the supersolution check.
const SUPER_SLACK: f64 = 1e-12;

struct Out<'a> {
    dir: &'a Path,
}

impl Out<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        Ok(write_file(&self.dir.join(name), contents)?)
    }

    /// `<stem>.json` or `<stem>.csv` according to `format`; the JSON form is
    /// also printed.
    fn report<T: Serialize>(
        &self,
        format: Format,
        stem: &str,
        json: &T,
        csv: impl FnOnce() -> Result<String, IoError>,
    ) -> Result<(), CliError> {
        let text = to_json(json)?;
        match format {
            Format::Json => self.write(&format!("{stem}.json"), &text)?,
            Format::Csv => self.write(&format!("{stem}.csv"), &csv()?)?,
        }
        print!("{text}");
        Ok(())
    }
}

pub(super) fn execute(c: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&c.out).map_err(|source| IoError::File {
        path: c.out.display().to_string(),
        source,
    })?;
    let out = Out { dir: &c.out };
    out.write("run.json", &to_json(c)?)?;
    match c.command {
        CommandName::Exponents => exponents(c, &out),
        CommandName::Profile => profile(c, &out),
        CommandName::Bounds => bounds(c, &out),
        CommandName::VerifyBarrier => verify_barrier(c, &out),
        CommandName::Solve => solve(c, &out),
        CommandName::Ratios => ratios(c, &out),
        CommandName::Experiment => experiment(c, &out),
    }
}

fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[derive(Serialize)]
struct TableEntry {
    alpha: f64,
    theta_star: Option<f64>,
}

#[derive(Serialize)]
struct ShootFailure {
    error: String,
    table: Vec<TableEntry>,
}

/// Writes the scanned `(α, θ*)` table of a failed shoot before reporting it.
fn shoot_or_report(
    c: &RunConfig,
    out: &Out,
    cone: &ConeSpec,
    branch: Branch,
) -> Result<ShootResult, CliError> {
    shoot(&c.op, cone, branch, &c.shooting).or_else(|e| {
        if let ConeError::NoStraddle { table } | ConeError::NonMonotone { table } = &e {
            let failure = ShootFailure {
                error: e.to_string(),
                table: table
                    .iter()
                    .map(|&(alpha, theta_star)| TableEntry { alpha, theta_star })
                    .collect(),
            };
            out.write("shoot_failure.json", &to_json(&failure)?)?;
        }
        Err(e.into())
    })
}

#[derive(Serialize)]
struct SweepRow {
    theta0: f64,
    alpha_plus: f64,
    alpha_minus: f64,
    alpha_lb: Option<f64>,
    alpha_ub: Option<f64>,
}

#[derive(Serialize)]
struct ExponentsReport<'a> {
    op: &'a crate::operators::OperatorSpec,
    dim: usize,
    theta0: f64,
    alpha_plus: f64,
    alpha_minus: f64,
    alpha_minus_via_inversion: f64,
    bounds: Option<BoundsReport>,
    plus: ShootResult,
    minus: ShootResult,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sweep: Vec<SweepRow>,
}

fn exponents(c: &RunConfig, out: &Out) -> Result<(), CliError> {
    let cone = ConeSpec::new(c.dim, c.theta0)?;
    let params = c.op.ellipticity(c.dim);
    let plus = shoot_or_report(c, out, &cone, Branch::Plus)?;
    let minus = shoot_or_report(c, out, &cone, Branch::Minus)?;
    let via_inversion = alpha_minus_via_inversion(&c.op, &cone, &c.shooting)?;
    let sweep = c
        .sweep
        .par_iter()
        .map(|&theta0| -> Result<SweepRow, CliError> {
            let cone = ConeSpec::new(c.dim, theta0)?;
            let bounds = bounds_report(&params, &cone).ok();
            Ok(SweepRow {
                theta0,
                alpha_plus: shoot(&c.op, &cone, Branch::Plus, &c.shooting)?.alpha,
                alpha_minus: shoot(&c.op, &cone, Branch::Minus, &c.shooting)?.alpha,
                alpha_lb: bounds.map(|b| b.alpha_lb),
                alpha_ub: bounds.map(|b| b.alpha_ub),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let bounds = bounds_report(&params, &cone).ok();
    let report = ExponentsReport {
        op: &c.op,
        dim: c.dim,
        theta0: c.theta0,
        alpha_plus: plus.alpha,
        alpha_minus: minus.alpha,
        alpha_minus_via_inversion: via_inversion,
        bounds,
        sweep,
        plus,
        minus,
    };
    out.report(c.format, "exponents", &report, || {
        let own = SweepRow {
            theta0: c.theta0,
            alpha_plus: report.alpha_plus,
            alpha_minus: report.alpha_minus,
            alpha_lb: bounds.map(|b| b.alpha_lb),
            alpha_ub: bounds.map(|b| b.alpha_ub),
        };
        let rows = if report.sweep.is_empty() {
            std::slice::from_ref(&own)
        } else {
            &report.sweep[..]
        };
        csv_table(
            &["theta0", "alpha_plus", "alpha_minus", "alpha_lb", "alpha_ub"],
            rows.iter().map(|r| {
                [
                    r.theta0,
                    r.alpha_plus,
                    r.alpha_minus,
                    r.alpha_lb.unwrap_or(f64::NAN),
                    r.alpha_ub.unwrap_or(f64::NAN),
                ]
            }),
        )
    })
}

#[derive(Serialize)]
struct ProfileReport<'a> {
    #[serde(flatten)]
    result: &'a ShootResult,
    theta: &'a [f64],
    phi: &'a [f64],
    dphi: &'a [f64],
}

fn profile(c: &RunConfig, out: &Out) -> Result<(), CliError> {
    let cone = ConeSpec::new(c.dim, c.theta0)?;
    let r = shoot_or_report(c, out, &cone, c.branch)?;
    out.write("exponent.json", &to_json(&r)?)?;
    let report = ProfileReport {
        result: &r,
        theta: &r.profile.theta,
        phi: &r.profile.phi,
        dphi: &r.profile.dphi,
    };
    let text = match c.format {
        Format::Json => to_json(&report)?,
        Format::Csv => profile_csv(&r.profile)?,
    };
    let name = match c.format {
        Format::Json => "profile.json",
        Format::Csv => "profile.csv",
    };
    out.write(name, &text)?;
    print!("{}", to_json(&r)?);
    Ok(())
}

fn bounds(c: &RunConfig, out: &Out) -> Result<(), CliError> {
    let cone = ConeSpec::new(c.dim, c.theta0)?;
    let b = bounds_report(&c.op.ellipticity(c.dim), &cone)?;
    out.report(c.format, "bounds", &b, || {
        csv_table(
            &["C1", "C2", "kappa", "alpha_lb", "alpha_ub", "sigma_lb", "sigma_ub"],
            [[b.c1, b.c2, b.kappa, b.alpha_lb, b.alpha_ub, b.sigma_lb, b.sigma_ub]],
        )
    })
}

#[derive(Serialize)]
struct BarrierReport {
    which: BarrierKind,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_residual: Option<f64>,
    witness: Vec<f64>,
    num_samples: usize,
    passed: bool,
}

fn verify_barrier(c: &RunConfig, out: &Out) -> Result<(), CliError> {
    let cone = ConeSpec::new(c.dim, c.theta0)?;
    let params = c.op.ellipticity(c.dim);
    let cfg = SampleConfig {
        num_samples: c.samples,
        seed: c.seed,
        radius: 1.0,
    };
    let report = match c.which {
        BarrierKind::Super => {
            let lb = lower_bound(&params, &cone)?;
            let alpha = c.alpha.unwrap_or(lb.alpha_lb);
            let r = verify_supersolution(&params, alpha, lb.kappa, lb.sigma_lb, c.dim, &cfg)?;
            BarrierReport {
                which: c.which,
                alpha,
                kappa: Some(lb.kappa),
                sigma: lb.sigma_lb,
                min_residual: Some(r.min_residual),
                max_residual: None,
                witness: r.witness,
                num_samples: r.num_samples,
                passed: r.min_residual >= -SUPER_SLACK,
            }
        }
        BarrierKind::Sub => {
            let ub = upper_bound(&params, &cone)?;
            let alpha = c
                .alpha
                .unwrap_or_else(|| admissible_sub_alpha(&params, c.dim, ub.sigma_ub));
            let r = verify_subsolution(&params, alpha, ub.sigma_ub, c.dim, &cfg)?;
            BarrierReport {
                which: c.which,
                alpha,
                kappa: None,
                sigma: ub.sigma_ub,
                min_residual: None,
                max_residual: Some(r.max_residual),
                witness: r.witness,
                num_samples: r.num_samples,
                passed: r.max_residual < 0.0,
            }
        }
    };
    out.report(c.format, "verify_barrier", &report, || {
        let residual = report.min_residual.or(report.max_residual).unwrap_or(f64::NAN);
        csv_table(
            &["alpha", "sigma", "residual", "num_samples", "passed"],
            [[
                report.alpha,
                report.sigma,
                residual,
                report.num_samples as f64,
                f64::from(u8::from(report.passed)),
            ]],
        )
    })?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{:?} barrier inequality violated at {:?}",
            report.which, report.witness
        )))
    }
}

fn planar_cone(c: &RunConfig) -> Result<ConeSpec, CliError> {
    if c.dim != 2 {
        return Err(CliError::Usage(format!(
            "the FD solver is planar; got --dim {}",
            c.dim
        )));
    }
    Ok(ConeSpec::new(2, c.theta0)?)
}

fn boundary_data(c: &RunConfig, out: &Out, grid: &PolarGrid) -> Result<BoundaryData, CliError> {
    if let Some(path) = &c.boundary.file {
        let samples = parse_samples(&read_file(path)?)?;
        return Ok(BoundaryData::from_samples(grid, &samples)?);
    }
    let v = c.boundary.value;
    let arc = |on_inner: bool, on_outer: bool| {
        move |_: f64, _: f64, kind: NodeKind| match kind {
            NodeKind::InnerArc if on_inner => v,
            NodeKind::OuterArc if on_outer => v,
            _ => 0.0,
        }
    };
    Ok(match c.boundary.preset {
        BoundaryPreset::Constant => BoundaryData::constant(grid, v),
        BoundaryPreset::InnerConstant => BoundaryData::from_fn(grid, arc(true, false)),
        BoundaryPreset::OuterConstant => BoundaryData::from_fn(grid, arc(false, true)),
        preset => {
            let cone = planar_cone(c)?;
            let branch = match preset {
                BoundaryPreset::PsiMinus => Branch::Minus,
                _ => Branch::Plus,
            };
            let r = shoot_or_report(c, out, &cone, branch)?;
            let psi = profile_trace(&r.profile);
            BoundaryData::from_fn(grid, |r, t, kind| match (preset, kind) {
                (BoundaryPreset::InnerPsiPlus, NodeKind::OuterArc) => 0.0,
                _ => psi(r, t, kind),
            })
        }
    })
}

fn grid_of(c: &RunConfig) -> Result<PolarGrid, CliError> {
    planar_cone(c)?;
    let g = c.grid;
    Ok(PolarGrid::new(g.r0, g.r1, g.nr, g.ntheta, c.theta0)?)
}

fn require_converged(report: &SolveReport) -> Result<(), CliError> {
    if report.converged {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "solver stopped after {} iterations at scaled residual {:e}",
            report.iterations, report.final_residual
        )))
    }
}

fn solve(c: &RunConfig, out: &Out) -> Result<(), CliError> {
    let grid = grid_of(c)?;
    let data = boundary_data(c, out, &grid)?;
    let sol = solve_dirichlet(&c.op, &grid, &data, &c.solver)?;
    out.write("field.csv", &field_csv(&sol.field)?)?;
    let text = to_json(&sol.report)?;
    out.write("solve.json", &text)?;
    print!("{text}");
    require_converged(&sol.report)
}

fn default_radii(r0: f64, r_max: f64) -> Result<Vec<f64>, CliError> {
    let hi = (10.0 * r0).min(0.5 * r_max);
    if !(hi > r0) {
        return Err(CliError::Usage(format!(
            "no room for a ratio trace on [{r0}, {r_max}]; pass --radii"
        )));
    }
    Ok(geometric(r0, hi, DEFAULT_RADII))
}

#[derive(Serialize)]
struct RatiosReport<'a> {
    branch: Branch,
    alpha: f64,
    #[serde(flatten)]
    trace: &'a crate::fd::RatioTrace,
    big_q_increase: f64,
    q_decrease: f64,
    solver: SolveReport,
}

fn trace_csv(trace: &crate::fd::RatioTrace) -> Result<String, IoError> {
    csv_table(
        &["r", "q", "Q"],
        (0..trace.r.len()).map(|k| [trace.r[k], trace.q[k], trace.big_q[k]]),
    )
}

fn ratios(c: &RunConfig, out: &Out) -> Result<(), CliError> {
    let grid = grid_of(c)?;
    let data = boundary_data(c, out, &grid)?;
    let sol = solve_dirichlet(&c.op, &grid, &data, &c.solver)?;
    let profile = shoot_or_report(c, out, &planar_cone(c)?, c.branch)?;
    let radii = match c.radii.is_empty() {
        true => default_radii(grid.r0, grid.r1)?,
        false => c.radii.clone(),
    };
    let trace = ratio_diagnostics(&sol.field, &profile.profile, &radii)?;
    let (up, down) = trace.monotonicity_defects();
    out.write("field.csv", &field_csv(&sol.field)?)?;
    let report = RatiosReport {
        branch: c.branch,
        alpha: profile.alpha,
        trace: &trace,
        big_q_increase: up,
        q_decrease: down,
        solver: sol.report,
    };
    out.report(c.format, "ratios", &report, || trace_csv(&trace))?;
    require_converged(&sol.report)
}

fn unit_domain_r0(c: &RunConfig) -> Result<f64, CliError> {
    if c.grid.r0 < 1.0 {
        Ok(c.grid.r0)
    } else {
        Err(CliError::Usage(format!(
            "this experiment runs on [r0, 1]; got --r0 {}",
            c.grid.r0
        )))
    }
}

fn experiment(c: &RunConfig, out: &Out) -> Result<(), CliError> {
    planar_cone(c)?;
    let g = c.grid;
    let (op, th, sh, cfg) = (&c.op, c.theta0, &c.shooting, &c.solver);
    let sizes = &c.experiment.sizes;
    let reports: Vec<SolveReport> = match c.experiment.kind {
        ExperimentKind::Manufactured => {
            let levels = experiment_manufactured(op, th, g.r0, g.r1, sizes, sh, cfg)?;
            out.report(c.format, "experiment", &levels, || {
                csv_table(
                    &["n", "rel_error", "max_abs_error", "final_residual"],
                    levels.iter().map(|l| {
                        [l.n as f64, l.rel_error, l.max_abs_error, l.solver.final_residual]
                    }),
                )
            })?;
            levels.iter().map(|l| l.solver).collect()
        }
        ExperimentKind::Ratios => {
            let radii = match c.radii.is_empty() {
                true => default_radii(g.r0, g.r1)?,
                false => c.radii.clone(),
            };
            let e = experiment_ratios(op, th, g.r0, g.r1, g.nr, g.ntheta, &radii, sh, cfg)?;
            out.report(c.format, "experiment", &e, || trace_csv(&e.trace))?;
            vec![e.solver]
        }
        ExperimentKind::Singularity => {
            let r0 = unit_domain_r0(c)?;
            let radii = match c.radii.is_empty() {
                true => default_radii(r0, 1.0)?,
                false => c.radii.clone(),
            };
            let grids = [(g.nr, g.ntheta)];
            let value = c.boundary.value;
            let traces =
                experiment_singularity(op, th, c.experiment.mode, r0, &grids, &radii, value, sh, cfg)?;
            out.report(c.format, "experiment", &traces, || {
                let rows = traces.iter().flat_map(|t| {
                    (0..t.plus.r.len()).map(move |k| {
                        [
                            t.nr as f64,
                            t.ntheta as f64,
                            t.plus.r[k],
                            t.plus.q[k],
                            t.plus.big_q[k],
                            t.minus.q[k],
                            t.minus.big_q[k],
                        ]
                    })
                });
                csv_table(&["nr", "ntheta", "r", "q_plus", "Q_plus", "q_minus", "Q_minus"], rows)
            })?;
            traces.iter().map(|t| t.solver).collect()
        }
        ExperimentKind::Hopf => {
            let r0 = unit_domain_r0(c)?;
            let t_list = match c.radii.is_empty() {
                true if 5.0 * r0 < 0.4 => geometric(5.0 * r0, 0.4, 4),
                true => return Err(CliError::Usage("pass --radii for the axial fit".into())),
                false => c.radii.clone(),
            };
            let e = experiment_hopf(op, th, r0, g.nr, g.ntheta, &t_list, sh, cfg)?;
            out.report(c.format, "experiment", &e, || {
                csv_table(
                    &["alpha_minus", "slope", "reference_slope"],
                    [[e.alpha_minus, e.slope, e.reference_slope]],
                )
            })?;
            vec![e.solver]
        }
        ExperimentKind::Harnack => {
            let rows = experiment_harnack(op, th, g.r0, g.r1, sizes, cfg)?;
            out.report(c.format, "experiment", &rows, || {
                csv_table(&["n", "ratio"], rows.iter().map(|h| [h.n as f64, h.ratio]))
            })?;
            Vec::new()
        }
    };
    reports.iter().try_for_each(require_converged)
}
