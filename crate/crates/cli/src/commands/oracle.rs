use cbop_core::oracle::{andreief_partition, OracleConfig, OracleReport, ORACLE_SCHEMA};
use serde::Serialize;

use super::lattice_applicable;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::write_json;

#[derive(Serialize)]
struct OracleDocument<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    passed: bool,
    reports: Vec<OracleReport>,
}

/// Compares the multiple-integral partition functions with the
/// determinants for every configured size and target.
pub fn run(cfg: &RunConfig) -> CliResult<Vec<OracleReport>> {
    let params = cfg.params_at(cfg.times()?.remove(0))?;
    lattice_applicable(&params).map_err(CliError::Config)?;
    let mut reports = Vec::new();
    for &n in &cfg.oracle.sizes {
        for &target in &cfg.oracle.targets {
            let started = std::time::Instant::now();
            let r = andreief_partition(&OracleConfig { n, target, params: params.clone(), tol: cfg.oracle.tol })?;
            log::info!(
                "{target:?} n = {n}: gap {:.2e}, estimate {:.2e} ({:.1?})",
                r.gap,
                r.estimated_error,
                started.elapsed()
            );
            reports.push(r);
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    write_json(
        &cfg.out_dir().join("oracle.json"),
        &OracleDocument { schema: ORACLE_SCHEMA, config: cfg, passed, reports: reports.clone() },
    )?;
    if !passed {
        return Err(CliError::Failed("quadrature and determinant disagree".into()));
    }
    Ok(reports)
}
