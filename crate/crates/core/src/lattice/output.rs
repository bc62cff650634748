use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::tower::TowerTrajectory;
use super::vars::LatticeState;
use crate::numerics::{Mode, Scalar};
use crate::report::ResidualReport;

/// One line of the long-format CSV output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub n: usize,
    pub t: String,
    pub quantity: String,
    pub value: String,
    pub mode: String,
    /// Decimal digits; empty in exact mode.
    pub precision: Option<u32>,
}

pub fn csv_header() -> [&'static str; 6] {
    ["n", "t", "quantity", "value", "mode", "precision"]
}

fn row(n: usize, t: &rug::Rational, quantity: &str, value: &Scalar, mode: Mode) -> CsvRow {
    CsvRow {
        n,
        t: t.to_string(),
        quantity: quantity.into(),
        value: value.to_repr(),
        mode: if mode.is_exact() { "exact".into() } else { "real".into() },
        precision: mode.digits(),
    }
}

pub fn state_csv_rows(state: &LatticeState) -> Vec<CsvRow> {
    let Some(first) = state.a.first() else { return Vec::new() };
    let mode = first.mode();
    let mut out = Vec::with_capacity(5 * state.len());
    for k in 0..state.len() {
        let n = state.n_lo + k;
        for (q, v) in [
            ("A", &state.a[k]),
            ("B", &state.b[k]),
            ("B_hat", &state.b_hat[k]),
            ("C", &state.c[k]),
            ("C_hat", &state.c_hat[k]),
        ] {
            out.push(row(n, &state.t, q, v, mode));
        }
    }
    out
}

pub fn tower_csv_rows(traj: &TowerTrajectory) -> Vec<CsvRow> {
    let mut out = Vec::new();
    for (t, levels) in traj.times.iter().zip(&traj.levels) {
        for l in levels {
            for (q, v) in [("tau", &l.tau), ("xi", &l.xi), ("xi_hat", &l.xi_hat)] {
                out.push(row(l.n, t, q, v, traj.mode));
            }
        }
    }
    out
}

/// Worst residual per equation across a set of reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSummary {
    /// `log10` of the largest residual; `null` when every value is an
    /// exact zero.
    pub max_log10: BTreeMap<String, Option<f64>>,
    pub checked_sites: usize,
    pub skipped_sites: usize,
}

pub fn summary(reports: &[ResidualReport]) -> LatticeSummary {
    let mut max_log10: BTreeMap<String, Option<f64>> = BTreeMap::new();
    let (mut checked_sites, mut skipped_sites) = (0, 0);
    for r in reports {
        checked_sites += r.checked_count();
        skipped_sites += r.skipped().count();
        for e in r.entries() {
            let slot = max_log10.entry(format!("{}.{}", r.suite, e.equation)).or_insert(None);
            *slot = match (*slot, e.log10_abs) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
        }
    }
    LatticeSummary { max_log10, checked_sites, skipped_sites }
}
