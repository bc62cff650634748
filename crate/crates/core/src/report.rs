//! Residual reports shared by the verification suites.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numerics::{Mode, Scalar};

pub const RESIDUAL_SCHEMA: &str = "cbop.residual-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum SiteStatus {
    Checked,
    BoundarySkipped { reason: String },
    Degenerate { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub equation: String,
    /// Round-trippable value.
    pub value: String,
    /// `log10|value|`; absent for an exact zero.
    pub log10_abs: Option<f64>,
}

impl ResidualEntry {
    pub fn new(equation: impl Into<String>, value: &Scalar) -> Self {
        let l = value.log10_abs();
        ResidualEntry { equation: equation.into(), value: value.to_repr(), log10_abs: l.is_finite().then_some(l) }
    }

    pub fn is_zero(&self) -> bool {
        self.log10_abs.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteReport {
    pub n: usize,
    #[serde(flatten)]
    pub status: SiteStatus,
    pub residuals: Vec<ResidualEntry>,
    /// Equations left out at a checked site because they reach past the
    /// boundary.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped_equations: Vec<String>,
}

impl SiteReport {
    pub fn checked(n: usize, residuals: Vec<ResidualEntry>) -> Self {
        SiteReport { n, status: SiteStatus::Checked, residuals, skipped_equations: Vec::new() }
    }

    pub fn skipped(n: usize, reason: impl Into<String>) -> Self {
        SiteReport {
            n,
            status: SiteStatus::BoundarySkipped { reason: reason.into() },
            residuals: Vec::new(),
            skipped_equations: Vec::new(),
        }
    }

    /// Degeneracies become report entries; anything else propagates.
    pub fn from_error(n: usize, err: Error) -> Result<Self, Error> {
        match err {
            Error::Degeneracy { .. } => Ok(SiteReport {
                n,
                status: SiteStatus::Degenerate { reason: err.to_string() },
                residuals: Vec::new(),
                skipped_equations: Vec::new(),
            }),
            e => Err(e),
        }
    }
}

/// Per-site residuals of one suite at one arithmetic setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub schema: String,
    pub suite: String,
    pub mode: Mode,
    pub sites: Vec<SiteReport>,
}

impl ResidualReport {
    pub fn new(suite: impl Into<String>, mode: Mode, sites: Vec<SiteReport>) -> Self {
        ResidualReport { schema: RESIDUAL_SCHEMA.into(), suite: suite.into(), mode, sites }
    }

    pub fn entries(&self) -> impl Iterator<Item = &ResidualEntry> {
        self.sites.iter().flat_map(|s| s.residuals.iter())
    }

    /// Largest `log10|r|` over every checked residual; `None` if all are
    /// exactly zero or nothing was checked.
    pub fn max_log10(&self) -> Option<f64> {
        self.entries().filter_map(|e| e.log10_abs).reduce(f64::max)
    }

    pub fn checked_count(&self) -> usize {
        self.sites.iter().filter(|s| s.status == SiteStatus::Checked).count()
    }

    pub fn skipped(&self) -> impl Iterator<Item = &SiteReport> {
        self.sites.iter().filter(|s| s.status != SiteStatus::Checked)
    }

    /// Exact mode demands exact zeros; real mode `|r| < 10^{tol_log10}`.
    pub fn passes(&self, tol_log10: f64) -> bool {
        match self.mode {
            Mode::Exact => self.entries().all(ResidualEntry::is_zero),
            Mode::Real { .. } => self.max_log10().is_none_or(|m| m < tol_log10),
        }
    }
}
