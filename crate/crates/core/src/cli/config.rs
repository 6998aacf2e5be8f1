//! The resolved run configuration echoed to `run.json`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::barriers::DEFAULT_SEED;
use crate::cone::{Branch, ShootingConfig};
use crate::fd::{SingularityMode, SolverConfig};
use crate::operators::OperatorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    #[default]
    Exponents,
    Profile,
    Bounds,
    VerifyBarrier,
    Solve,
    Ratios,
    Experiment,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exponents => "exponents",
            Self::Profile => "profile",
            Self::Bounds => "bounds",
            Self::VerifyBarrier => "verify-barrier",
            Self::Solve => "solve",
            Self::Ratios => "ratios",
            Self::Experiment => "experiment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BarrierKind {
    /// The supersolution behind the lower bound.
    #[default]
    Super,
    /// The subsolution behind the upper bound.
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPreset {
    /// `Ψ⁺` on both arcs, zero on the lateral rays.
    #[default]
    PsiPlus,
    /// `Ψ⁻` on both arcs, zero on the lateral rays.
    PsiMinus,
    /// `Ψ⁺` on the inner arc, zero elsewhere.
    InnerPsiPlus,
    /// `value` on every boundary node.
    Constant,
    /// `value` on the inner arc, zero elsewhere.
    InnerConstant,
    /// `value` on the outer arc, zero elsewhere.
    OuterConstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    #[default]
    Manufactured,
    Ratios,
    Singularity,
    Hopf,
    Harnack,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub r0: f64,
    pub r1: f64,
    pub nr: usize,
    pub ntheta: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            r0: 1.0,
            r1: 4.0,
            nr: 64,
            ntheta: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryConfig {
    pub preset: BoundaryPreset,
    pub value: f64,
    /// An `r,theta,value` CSV covering every boundary node; overrides the
    /// preset.
    pub file: Option<PathBuf>,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            preset: BoundaryPreset::PsiPlus,
            value: 1.0,
            file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Square grid sizes of the refinement studies.
    pub sizes: Vec<usize>,
    pub mode: SingularityMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Manufactured,
            sizes: vec![32, 64, 128],
            mode: SingularityMode::Singular,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    pub op: OperatorSpec,
    pub dim: usize,
    pub theta0: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub branch: Branch,
    /// Apertures of the `exponents` sweep.
    pub sweep: Vec<f64>,
    pub which: BarrierKind,
    pub samples: usize,
    /// Exponent of the verified barrier; the construction's own when absent.
    pub alpha: Option<f64>,
    pub grid: GridConfig,
    pub boundary: BoundaryConfig,
    /// Radii of ratio traces and axial fits; a default geometric list when
    /// empty.
    pub radii: Vec<f64>,
    pub experiment: ExperimentConfig,
    pub shooting: ShootingConfig,
    pub solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: CommandName::Exponents,
            op: OperatorSpec::Laplacian,
            dim: 2,
            theta0: std::f64::consts::FRAC_PI_4,
            seed: DEFAULT_SEED,
            out: PathBuf::from("singcones-out"),
            format: Format::Json,
            branch: Branch::Plus,
            sweep: Vec::new(),
            which: BarrierKind::Super,
            samples: 10_000,
            alpha: None,
            grid: GridConfig::default(),
            boundary: BoundaryConfig::default(),
            radii: Vec::new(),
            experiment: ExperimentConfig::default(),
            shooting: ShootingConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}
