//! The versioned TOML run configuration.

use std::path::{Path, PathBuf};

use cbop_core::moments::{ModelParams, Weight};
use cbop_core::numerics::{parse_rational, Mode};
use cbop_core::oracle::Target;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Orth,
    Recurrence,
    Gct,
    Bilinear,
    Nonlinear,
    Evolve,
    Oracle,
    Jacobi,
    Degeneration,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Orth => "orth",
            Suite::Recurrence => "recurrence",
            Suite::Gct => "gct",
            Suite::Bilinear => "bilinear",
            Suite::Nonlinear => "nonlinear",
            Suite::Evolve => "evolve",
            Suite::Oracle => "oracle",
            Suite::Jacobi => "jacobi",
            Suite::Degeneration => "degeneration",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Exact,
    Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub weight: Weight,
    pub k1: u32,
    pub k2: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArithmeticSection {
    pub mode: ModeName,
    /// Decimal digits in real mode.
    #[serde(default = "default_precision")]
    pub precision: u32,
}

fn default_precision() -> u32 {
    50
}

impl Default for ArithmeticSection {
    fn default() -> Self {
        ArithmeticSection { mode: ModeName::Exact, precision: default_precision() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub n_max: usize,
    /// Times as rational strings.
    pub t_grid: Vec<String>,
    pub suites: Vec<Suite>,
    pub deriv_depth: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            n_max: 4,
            t_grid: vec!["0".into()],
            suites: vec![Suite::Orth, Suite::Recurrence, Suite::Gct, Suite::Bilinear, Suite::Nonlinear, Suite::Jacobi],
            deriv_depth: 2,
            out: None,
        }
    }
}

/// Tolerances as `log10` bounds. Exact mode always demands exact zeros.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    /// Real-mode bound; defaults to `−(precision − 30)`.
    pub real_log10: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveSection {
    pub n_lo: usize,
    pub n_hi: usize,
    pub t0: String,
    pub t1: String,
    pub steps: usize,
    /// Also integrate the bilinear tower up to this level.
    pub tower_n_max: Option<usize>,
    /// Precision used when the run itself is exact.
    pub precision: u32,
    pub max_error: f64,
    pub order_range: [f64; 2],
}

impl Default for EvolveSection {
    fn default() -> Self {
        EvolveSection {
            n_lo: 1,
            n_hi: 3,
            t0: "0".into(),
            t1: "1/5".into(),
            steps: 64,
            tower_n_max: None,
            precision: 40,
            max_error: 1e-10,
            order_range: [3.7, 4.3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub sizes: Vec<usize>,
    pub targets: Vec<Target>,
    pub tol: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection { sizes: vec![1, 2], targets: Target::ALL.to_vec(), tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub model: ModelSection,
    #[serde(default)]
    pub arithmetic: ArithmeticSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub tolerance: ToleranceSection,
    #[serde(default)]
    pub evolve: EvolveSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

fn bad(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let c: RunConfig = toml::from_str(text).map_err(bad)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.version != CONFIG_VERSION {
            return Err(bad(format!("config version {} is not supported (expected {CONFIG_VERSION})", self.version)));
        }
        if self.run.t_grid.is_empty() {
            return Err(bad("run.t_grid is empty"));
        }
        for t in self.times()? {
            self.params_at(t)?;
        }
        if self.evolve.n_lo == 0 || self.evolve.n_hi < self.evolve.n_lo {
            return Err(bad("evolve window needs 1 ≤ n_lo ≤ n_hi"));
        }
        parse_rational(&self.evolve.t0).map_err(bad)?;
        parse_rational(&self.evolve.t1).map_err(bad)?;
        if self.oracle.sizes.iter().any(|n| !(1..=2).contains(n)) {
            return Err(bad("oracle sizes must be 1 or 2"));
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        match self.arithmetic.mode {
            ModeName::Exact => Mode::Exact,
            ModeName::Real => Mode::real(self.arithmetic.precision),
        }
    }

    /// Real-mode residual bound as `log10`.
    pub fn real_tolerance_log10(&self) -> f64 {
        self.tolerance.real_log10.unwrap_or(-(self.arithmetic.precision as f64 - 30.0))
    }

    pub fn times(&self) -> CliResult<Vec<cbop_core::numerics::Rational>> {
        self.run.t_grid.iter().map(|s| parse_rational(s).map_err(bad)).collect()
    }

    pub fn params_at(&self, t: cbop_core::numerics::Rational) -> CliResult<ModelParams> {
        ModelParams::new(self.model.weight.clone(), self.model.k1, self.model.k2, t, self.mode()).map_err(bad)
    }

    /// Applies command-line overrides and re-validates.
    pub fn with_overrides(
        mut self,
        mode: Option<ModeName>,
        precision: Option<u32>,
        out: Option<PathBuf>,
    ) -> CliResult<Self> {
        if let Some(m) = mode {
            self.arithmetic.mode = m;
        }
        if let Some(p) = precision {
            self.arithmetic.precision = p;
        }
        if out.is_some() {
            self.run.out = out;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.run.out.clone().unwrap_or_else(|| PathBuf::from("cbop-out"))
    }
}
