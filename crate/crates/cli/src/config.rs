//! Run configuration from flags and an optional JSON file (flags win).

use std::path::{Path, PathBuf};

use afem_core::adaptivity::AfemParams;
use afem_core::solver::DEFAULT_ITERATION_CAP;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// Stopping parameter forced by the oversolve mode.
pub const OVERSOLVE_MU: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Afem,
    /// `μ = 1e-5`.
    Oversolve,
    /// Direct solve per level, algebraic errors and contraction factors.
    Validate,
}

/// Everything a run needs. Written next to the history as `config.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: String,
    pub p: usize,
    pub k: u32,
    pub theta: f64,
    pub mu: f64,
    pub max_dofs: usize,
    pub iteration_cap: usize,
    pub mode: Mode,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: "l_shape".into(),
            p: 1,
            k: 1,
            theta: 0.5,
            mu: 0.1,
            max_dofs: 10_000,
            iteration_cap: DEFAULT_ITERATION_CAP,
            mode: Mode::Afem,
            out: PathBuf::from("out"),
        }
    }
}

/// Partial configuration, as read from JSON or given on the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    /// l_shape, checkerboard, stripes, zero or flux.
    #[arg(long)]
    pub problem: Option<String>,
    /// Polynomial degree.
    #[arg(long)]
    pub p: Option<usize>,
    /// Contrast parameter of checkerboard and stripes.
    #[arg(long)]
    pub k: Option<u32>,
    /// Dörfler parameter in (0, 1].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Solver stopping parameter.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Stop after the first level with more free dofs than this.
    #[arg(long)]
    pub max_dofs: Option<usize>,
    /// Solver steps allowed per level.
    #[arg(long)]
    pub iteration_cap: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// `self` on top of `base`.
    pub fn over(self, base: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            problem: self.problem.or(base.problem),
            p: self.p.or(base.p),
            k: self.k.or(base.k),
            theta: self.theta.or(base.theta),
            mu: self.mu.or(base.mu),
            max_dofs: self.max_dofs.or(base.max_dofs),
            iteration_cap: self.iteration_cap.or(base.iteration_cap),
            mode: self.mode.or(base.mode),
            out: self.out.or(base.out),
        }
    }

    pub fn resolve(self) -> CliResult<RunConfig> {
        let d = RunConfig::default();
        let mode = self.mode.unwrap_or(d.mode);
        let mut cfg = RunConfig {
            problem: self.problem.unwrap_or(d.problem),
            p: self.p.unwrap_or(d.p),
            k: self.k.unwrap_or(d.k),
            theta: self.theta.unwrap_or(d.theta),
            mu: self.mu.unwrap_or(d.mu),
            max_dofs: self.max_dofs.unwrap_or(d.max_dofs),
            iteration_cap: self.iteration_cap.unwrap_or(d.iteration_cap),
            mode,
            out: self.out.unwrap_or(d.out),
        };
        if mode == Mode::Oversolve {
            cfg.mu = OVERSOLVE_MU;
        }
        cfg.params().check().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn params(&self) -> AfemParams {
        AfemParams {
            theta: self.theta,
            mu: self.mu,
            degree: self.p,
            max_dofs: self.max_dofs,
            iteration_cap: self.iteration_cap,
            validate: self.mode == Mode::Validate,
        }
    }
}
