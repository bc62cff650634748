use cbop_core::biorth::orthogonality_report;
use cbop_core::lattice::{
    bilinear_report, degeneration_report, jacobi_report, lattice_table, nonlinear_report, rk4_order_check,
};
use cbop_core::moments::{build_table, ModelParams, MomentTable};
use cbop_core::numerics::Rational;
use cbop_core::oracle::{andreief_partition, OracleConfig, OracleReport};
use cbop_core::recurrence::{dual_gct_residual, gct_residual, recurrence_report, required_n_max};
use cbop_core::report::{ResidualReport, SiteStatus};
use serde::Serialize;

use super::lattice_applicable;
use crate::config::{RunConfig, Suite};
use crate::error::{CliError, CliResult};
use crate::output::{write_csv, write_json};

pub const VERIFY_SCHEMA: &str = "cbop.verify/1";

#[derive(Clone, Debug, Serialize)]
pub struct TimedReport {
    pub t: String,
    pub report: ResidualReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderSummary {
    pub steps: usize,
    pub error_coarse: f64,
    pub error_fine: f64,
    pub order: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub applicable: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Worst `log10|r|`; `null` when every residual is an exact zero.
    pub max_log10: Option<f64>,
    pub checked_sites: usize,
    pub skipped_sites: Vec<SkippedSite>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<TimedReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<OrderSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedSite {
    pub t: String,
    pub n: usize,
    #[serde(flatten)]
    pub status: SiteStatus,
}

impl SuiteOutcome {
    fn not_applicable(suite: Suite, why: String) -> Self {
        log::warn!("{}: not applicable ({why})", suite.name());
        SuiteOutcome {
            suite,
            applicable: false,
            passed: true,
            note: Some(why),
            max_log10: None,
            checked_sites: 0,
            skipped_sites: vec![],
            reports: vec![],
            convergence: None,
            oracle: vec![],
        }
    }

    fn from_reports(suite: Suite, reports: Vec<TimedReport>, tol_log10: f64) -> Self {
        let passed = reports.iter().all(|r| r.report.passes(tol_log10));
        let max_log10 = reports.iter().filter_map(|r| r.report.max_log10()).reduce(f64::max);
        let checked_sites = reports.iter().map(|r| r.report.checked_count()).sum();
        let skipped_sites = reports
            .iter()
            .flat_map(|r| r.report.skipped().map(|s| SkippedSite { t: r.t.clone(), n: s.n, status: s.status.clone() }))
            .collect();
        SuiteOutcome {
            suite,
            applicable: true,
            passed,
            note: None,
            max_log10,
            checked_sites,
            skipped_sites,
            reports,
            convergence: None,
            oracle: vec![],
        }
    }
}

#[derive(Serialize)]
struct VerifyDocument<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    fault_injected: bool,
    passed: bool,
    suites: Vec<SuiteSummary>,
}

#[derive(Serialize)]
struct SuiteSummary {
    suite: Suite,
    applicable: bool,
    passed: bool,
    max_log10: Option<f64>,
    checked_sites: usize,
    skipped_sites: usize,
}

#[derive(Serialize)]
struct SuiteDocument<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    fault_injected: bool,
    #[serde(flatten)]
    outcome: &'a SuiteOutcome,
}

/// One row of `residuals.csv`.
#[derive(Serialize)]
struct ResidualRow<'a> {
    suite: &'a str,
    t: &'a str,
    n: usize,
    status: &'static str,
    equation: &'a str,
    value: &'a str,
    log10_abs: Option<f64>,
}

/// Shifts one bi-moment so every identity that reads it breaks.
fn corrupt(table: MomentTable) -> CliResult<MomentTable> {
    let v = table.bi(1, 1)?.clone();
    let bumped = v.clone() + v.rational_like(&Rational::from((1, 997)));
    log::warn!("fault injection: m(1,1) {} -> {}", v.to_display(12), bumped.to_display(12));
    Ok(table.with_bi_entry(1, 1, bumped)?)
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    inject: bool,
}

impl Ctx<'_> {
    fn table(&self, kind: TableKind, params: &ModelParams) -> CliResult<MomentTable> {
        let table = match kind {
            TableKind::Plain(n) => build_table(params, n, 0)?,
            TableKind::Jets(n) => build_table(params, n, 1)?,
            TableKind::Lattice(n, depth) => lattice_table(params, n, depth)?,
        };
        if self.inject {
            corrupt(table)
        } else {
            Ok(table)
        }
    }

    fn tol(&self) -> f64 {
        self.cfg.real_tolerance_log10()
    }

    fn over_grid(
        &self,
        suite: Suite,
        mut f: impl FnMut(&ModelParams) -> CliResult<Vec<ResidualReport>>,
    ) -> CliResult<SuiteOutcome> {
        let mut reports = Vec::new();
        for (s, t) in self.cfg.run.t_grid.iter().zip(self.cfg.times()?) {
            let p = self.cfg.params_at(t)?;
            for report in f(&p)? {
                reports.push(TimedReport { t: s.clone(), report });
            }
        }
        Ok(SuiteOutcome::from_reports(suite, reports, self.tol()))
    }
}

enum TableKind {
    Plain(usize),
    Jets(usize),
    Lattice(usize, usize),
}

fn run_suite(ctx: &Ctx, suite: Suite) -> CliResult<SuiteOutcome> {
    let cfg = ctx.cfg;
    let n = cfg.run.n_max;
    let first = cfg.params_at(cfg.times()?[0].clone())?;
    let lattice_ok = lattice_applicable(&first);
    match suite {
        Suite::Orth => ctx.over_grid(suite, |p| Ok(vec![orthogonality_report(n, &ctx.table(TableKind::Plain(n), p)?)?])),
        Suite::Recurrence => ctx.over_grid(suite, |p| {
            let size = required_n_max(n, p.k1, p.k2);
            Ok(vec![recurrence_report(n, &ctx.table(TableKind::Plain(size), p)?)?])
        }),
        Suite::Gct => {
            if !first.has_time_flow() {
                return Ok(SuiteOutcome::not_applicable(suite, "needs a weight with a time flow".into()));
            }
            ctx.over_grid(suite, |p| {
                let table = ctx.table(TableKind::Jets(required_n_max(n, p.k1, p.k2)), p)?;
                Ok(vec![gct_residual(n, &table)?, dual_gct_residual(n, &table)?])
            })
        }
        Suite::Bilinear | Suite::Nonlinear | Suite::Jacobi | Suite::Degeneration => {
            if let Err(why) = lattice_ok {
                return Ok(SuiteOutcome::not_applicable(suite, why));
            }
            if suite == Suite::Degeneration && !first.is_symmetric() {
                return Ok(SuiteOutcome::not_applicable(suite, "needs identical weights on both sides".into()));
            }
            ctx.over_grid(suite, |p| {
                let depth = if suite == Suite::Degeneration { cfg.run.deriv_depth.max(1) } else { 1 };
                let table = ctx.table(TableKind::Lattice(n + 1, depth), p)?;
                Ok(vec![match suite {
                    Suite::Bilinear => bilinear_report(n, &table)?,
                    Suite::Nonlinear => nonlinear_report(n, &table)?,
                    Suite::Jacobi => jacobi_report(n, &table)?,
                    _ => degeneration_report(n, &table)?,
                }])
            })
        }
        Suite::Evolve => {
            if let Err(why) = lattice_ok {
                return Ok(SuiteOutcome::not_applicable(suite, why));
            }
            let e = &cfg.evolve;
            let digits = cfg.mode().digits().unwrap_or(e.precision);
            let params = cfg
                .params_at(cbop_core::numerics::parse_rational(&e.t0)?)?
                .with_mode(cbop_core::numerics::Mode::real(digits))?;
            let t1 = cbop_core::numerics::parse_rational(&e.t1)?;
            if params.t == t1 {
                let mut o = SuiteOutcome::from_reports(suite, vec![], ctx.tol());
                o.note = Some("zero-length interval; nothing to integrate".into());
                return Ok(o);
            }
            let c = rk4_order_check(&params, e.n_lo, e.n_hi, &t1, e.steps)?;
            let passed = c.error_coarse < e.max_error && (e.order_range[0]..=e.order_range[1]).contains(&c.order);
            log::info!("evolve: error {:.3e} at {} steps, order {:.3}", c.error_coarse, c.steps, c.order);
            let mut o = SuiteOutcome::from_reports(suite, vec![], ctx.tol());
            o.passed = passed;
            o.max_log10 = Some(c.error_coarse.log10());
            o.convergence = Some(OrderSummary {
                steps: c.steps,
                error_coarse: c.error_coarse,
                error_fine: c.error_fine,
                order: c.order,
            });
            if ctx.inject {
                o.note = Some("fault injection does not apply to integration".into());
            }
            Ok(o)
        }
        Suite::Oracle => {
            if let Err(why) = lattice_ok {
                return Ok(SuiteOutcome::not_applicable(suite, why));
            }
            let mut reports = Vec::new();
            for &size in &cfg.oracle.sizes {
                for &target in &cfg.oracle.targets {
                    let r = andreief_partition(&OracleConfig {
                        n: size,
                        target,
                        params: first.clone(),
                        tol: cfg.oracle.tol,
                    })?;
                    log::info!("oracle {target:?} n = {size}: gap {:.2e}", r.gap);
                    reports.push(r);
                }
            }
            let mut o = SuiteOutcome::from_reports(suite, vec![], ctx.tol());
            o.passed = reports.iter().all(|r| r.passed);
            o.max_log10 = reports.iter().map(|r| r.gap.log10()).reduce(f64::max);
            o.checked_sites = reports.len();
            o.oracle = reports;
            if ctx.inject {
                o.note = Some("fault injection does not apply to quadrature".into());
            }
            Ok(o)
        }
    }
}

/// Runs the selected suites, writes the reports and fails if any contract
/// is exceeded.
pub fn run(cfg: &RunConfig, inject: bool) -> CliResult<Vec<SuiteOutcome>> {
    let ctx = Ctx { cfg, inject };
    let dir = cfg.out_dir().join("verify");
    let mut suites = cfg.run.suites.clone();
    suites.sort();
    suites.dedup();
    let mut outcomes = Vec::new();
    for suite in suites {
        log::info!("running {}", suite.name());
        let o = run_suite(&ctx, suite)?;
        log::info!("{}: {}", suite.name(), if o.passed { "pass" } else { "FAIL" });
        write_json(
            &dir.join(format!("{}.json", suite.name())),
            &SuiteDocument { schema: VERIFY_SCHEMA, config: cfg, fault_injected: inject, outcome: &o },
        )?;
        outcomes.push(o);
    }
    let mut rows = Vec::new();
    for o in &outcomes {
        for r in &o.reports {
            for s in &r.report.sites {
                let status = match s.status {
                    SiteStatus::Checked => "checked",
                    SiteStatus::BoundarySkipped { .. } => "boundary_skipped",
                    SiteStatus::Degenerate { .. } => "degenerate",
                };
                for e in &s.residuals {
                    rows.push(ResidualRow {
                        suite: &r.report.suite,
                        t: &r.t,
                        n: s.n,
                        status,
                        equation: &e.equation,
                        value: &e.value,
                        log10_abs: e.log10_abs,
                    });
                }
            }
        }
    }
    write_csv(&dir.join("residuals.csv"), &rows)?;
    let passed = outcomes.iter().all(|o| o.passed);
    let summary = VerifyDocument {
        schema: VERIFY_SCHEMA,
        config: cfg,
        fault_injected: inject,
        passed,
        suites: outcomes
            .iter()
            .map(|o| SuiteSummary {
                suite: o.suite,
                applicable: o.applicable,
                passed: o.passed,
                max_log10: o.max_log10,
                checked_sites: o.checked_sites,
                skipped_sites: o.skipped_sites.len(),
            })
            .collect(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    if !passed {
        let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.suite.name()).collect();
        return Err(CliError::Failed(format!("suites over tolerance: {}", failed.join(", "))));
    }
    Ok(outcomes)
}
