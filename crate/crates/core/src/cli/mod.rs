//! The `singcones` command line: argument parsing, config resolution and
//! exit codes (0 success, 1 bad arguments or files, 2 numerical failure).

mod commands;
mod config;

pub use config::{
    BarrierKind, BoundaryConfig, BoundaryPreset, CommandName, ExperimentConfig, ExperimentKind,
    Format, GridConfig, RunConfig,
};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::barriers::BarrierError;
use crate::cone::{Branch, ConeError};
use crate::fd::{Discretization, FdError, SingularityMode};
use crate::io::{read_file, IoError};
use crate::operators::{OperatorError, OperatorSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ConeError> for CliError {
    fn from(e: ConeError) -> Self {
        match e {
            ConeError::InvalidCone(_)
            | ConeError::InvalidConfig(_)
            | ConeError::Operator(_)
            | ConeError::NotRotationEquivariant
            | ConeError::AngleOutOfRange { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<BarrierError> for CliError {
    fn from(e: BarrierError) -> Self {
        match e {
            BarrierError::Cone(c) => c.into(),
            BarrierError::EmptySigmaRange { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FdError> for CliError {
    fn from(e: FdError) -> Self {
        match e {
            FdError::Cone(c) => c.into(),
            FdError::LinearSolve(_) | FdError::NonPositive { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "singcones", version, about = "Singular exponents, barriers and FD experiments in cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exponents α⁺, α⁻ (and α⁻ through the inversion) with the barrier bounds.
    Exponents(Flags),
    /// The angular profile of Ψ⁺ or Ψ⁻.
    Profile(Flags),
    /// Closed-form bounds on α⁺ for the ellipticity class of the operator.
    Bounds(Flags),
    /// Samples the differential inequality of a barrier.
    VerifyBarrier(Flags),
    /// Dirichlet solve on an annular sector.
    Solve(Flags),
    /// Dirichlet solve followed by the ratio trace against Ψ±.
    Ratios(Flags),
    /// One of the desk-scale FD experiments.
    Experiment(Flags),
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    /// JSON run configuration (e.g. a previous run.json); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// laplacian, pucci-plus, pucci-minus, extremal-plus or extremal-minus.
    #[arg(long)]
    op: Option<String>,
    /// JSON operator file.
    #[arg(long, conflicts_with = "op")]
    op_file: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "Lambda")]
    big_lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    theta0: Option<f64>,
    /// Read angles in degrees.
    #[arg(long)]
    degrees: bool,
    /// Shooting tolerance on α, or solver tolerance for the FD commands.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_parser = parse_branch)]
    branch: Option<Branch>,
    /// Comma-separated apertures for an exponent sweep.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    which: Option<BarrierKind>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    ntheta: Option<usize>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryPreset>,
    /// Constant of the constant boundary presets.
    #[arg(long, allow_negative_numbers = true)]
    value: Option<f64>,
    /// `r,theta,value` CSV of boundary data.
    #[arg(long)]
    boundary_file: Option<PathBuf>,
    /// Comma-separated radii for ratio traces and axial fits.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Discretization>,
    #[arg(long)]
    directions: Option<usize>,
    #[arg(long)]
    step_scale: Option<f64>,
    #[arg(long, value_enum)]
    kind: Option<ExperimentKind>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<SingularityMode>,
    /// Comma-separated grid sizes of refinement studies.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    s.parse()
}

fn parse_scheme(s: &str) -> Result<Discretization, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<SingularityMode, String> {
    s.parse()
}

fn operator_from_flags(f: &Flags, name: &str) -> Result<OperatorSpec, CliError> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| CliError::Usage(format!("--op {name} requires --{flag}")))
    };
    let lambda = || need(f.lambda, "lambda");
    let big = || need(f.big_lambda, "Lambda");
    Ok(match name {
        "laplacian" => OperatorSpec::Laplacian,
        "pucci-plus" => OperatorSpec::pucci_plus(lambda()?, big()?)?,
        "pucci-minus" => OperatorSpec::pucci_minus(lambda()?, big()?)?,
        "extremal-plus" => OperatorSpec::extremal_plus(lambda()?, big()?, f.mu.unwrap_or(0.0))?,
        "extremal-minus" => OperatorSpec::extremal_minus(lambda()?, big()?, f.mu.unwrap_or(0.0))?,
        other => return Err(CliError::Usage(format!("unknown operator {other:?}"))),
    })
}

fn resolve(command: CommandName, f: Flags) -> Result<RunConfig, CliError> {
    let mut c = match &f.config {
        Some(path) => serde_json::from_str::<RunConfig>(&read_file(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => RunConfig::default(),
    };
    c.command = command;
    let angle = |v: f64| if f.degrees { v.to_radians() } else { v };
    if let Some(path) = &f.op_file {
        c.op = serde_json::from_str(&read_file(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    } else if let Some(name) = &f.op {
        c.op = operator_from_flags(&f, name)?;
    } else if f.lambda.is_some() || f.big_lambda.is_some() || f.mu.is_some() {
        return Err(CliError::Usage("--lambda, --Lambda and --mu require --op".into()));
    }
    if let Some(v) = f.dim {
        c.dim = v;
    }
    if let Some(v) = f.theta0 {
        c.theta0 = angle(v);
    }
    if let Some(v) = f.tol {
        match command {
            CommandName::Solve | CommandName::Ratios | CommandName::Experiment => c.solver.tol = v,
            _ => c.shooting.tol_alpha = v,
        }
    }
    if let Some(v) = f.out {
        c.out = v;
    }
    if let Some(v) = f.seed {
        c.seed = v;
    }
    if let Some(v) = f.format {
        c.format = v;
    }
    if let Some(v) = f.branch {
        c.branch = v;
    }
    if let Some(v) = f.sweep {
        c.sweep = v.into_iter().map(angle).collect();
    }
    if let Some(v) = f.which {
        c.which = v;
    }
    if let Some(v) = f.samples {
        c.samples = v;
    }
    if f.alpha.is_some() {
        c.alpha = f.alpha;
    }
    if let Some(v) = f.r0 {
        c.grid.r0 = v;
    }
    if let Some(v) = f.r1 {
        c.grid.r1 = v;
    }
    if let Some(v) = f.nr {
        c.grid.nr = v;
    }
    if let Some(v) = f.ntheta {
        c.grid.ntheta = v;
    }
    if let Some(v) = f.boundary {
        c.boundary.preset = v;
    }
    if let Some(v) = f.value {
        c.boundary.value = v;
    }
    if f.boundary_file.is_some() {
        c.boundary.file = f.boundary_file;
    }
    if let Some(v) = f.radii {
        c.radii = v;
    }
    if let Some(v) = f.scheme {
        c.solver.scheme = v;
    }
    if let Some(v) = f.directions {
        c.solver.stencil.directions = v;
    }
    if let Some(v) = f.step_scale {
        c.solver.stencil.step_scale = v;
    }
    if let Some(v) = f.kind {
        c.experiment.kind = v;
    }
    if let Some(v) = f.mode {
        c.experiment.mode = v;
    }
    if let Some(v) = f.sizes {
        c.experiment.sizes = v;
    }
    Ok(c)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, flags) = match cli.command {
        Command::Exponents(f) => (CommandName::Exponents, f),
        Command::Profile(f) => (CommandName::Profile, f),
        Command::Bounds(f) => (CommandName::Bounds, f),
        Command::VerifyBarrier(f) => (CommandName::VerifyBarrier, f),
        Command::Solve(f) => (CommandName::Solve, f),
        Command::Ratios(f) => (CommandName::Ratios, f),
        Command::Experiment(f) => (CommandName::Experiment, f),
    };
    match resolve(name, flags).and_then(|c| commands::execute(&c)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("singcones {}: {e}", name.as_str());
            e.exit_code()
        }
    }
}
