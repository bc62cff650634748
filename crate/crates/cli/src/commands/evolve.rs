use cbop_core::lattice::{
    bilinear_tower_integrate, evolve_nonlinear, lattice_state, lattice_table, rk4_order_check, state_csv_rows,
    tau_fed_boundary, tower_csv_rows, CsvRow,
};
use cbop_core::numerics::{parse_rational, Mode};
use serde::Serialize;

use super::lattice_applicable;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{write_csv, write_json};

pub const EVOLVE_SCHEMA: &str = "cbop.evolve/1";

#[derive(Serialize)]
struct Convergence {
    steps: usize,
    error_coarse: f64,
    error_fine: f64,
    order: f64,
    passed: bool,
}

#[derive(Serialize)]
struct EvolveDocument<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    t0: String,
    t1: String,
    steps: usize,
    /// `max |x − x_exact|` at `t1` against the determinant formulas.
    terminal_gap: f64,
    convergence: Option<Convergence>,
    tower_levels: Option<usize>,
}

/// Integrates the nonlinear lattice on the configured window and writes the
/// trajectory with its convergence check.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let e = &cfg.evolve;
    let t0 = parse_rational(&e.t0).map_err(|x| CliError::Config(x.to_string()))?;
    let t1 = parse_rational(&e.t1).map_err(|x| CliError::Config(x.to_string()))?;
    let base = cfg.params_at(t0.clone())?;
    lattice_applicable(&base).map_err(CliError::Config)?;
    let mode = match cfg.mode() {
        Mode::Exact => {
            log::info!("integration runs in real arithmetic at {} digits", e.precision);
            Mode::real(e.precision)
        }
        m => m,
    };
    let params = base.with_mode(mode)?;
    let start = lattice_state(e.n_lo, e.n_hi, &lattice_table(&params, e.n_hi + 1, 1)?)?;
    let mut boundary = tau_fed_boundary(&params, e.n_lo, e.n_hi);
    let result = evolve_nonlinear(&start, &t1, e.steps, &mut boundary)?;
    let reference = lattice_state(e.n_lo, e.n_hi, &lattice_table(&params.at_time(t1.clone())?, e.n_hi + 1, 1)?)?;
    let terminal_gap = result.terminal().max_gap(&reference);

    let dir = cfg.out_dir().join("evolve");
    let rows: Vec<CsvRow> = result.trajectory.iter().flat_map(state_csv_rows).collect();
    write_csv(&dir.join("trajectory.csv"), &rows)?;

    let tower_levels = match e.tower_n_max {
        Some(n) => {
            let traj = bilinear_tower_integrate(n, &t1, e.steps.max(1), &params)?;
            write_csv(&dir.join("tower.csv"), &tower_csv_rows(&traj))?;
            Some(n)
        }
        None => None,
    };

    let convergence = if t0 == t1 {
        None
    } else {
        let c = rk4_order_check(&params, e.n_lo, e.n_hi, &t1, e.steps)?;
        let passed = c.error_coarse < e.max_error && (e.order_range[0]..=e.order_range[1]).contains(&c.order);
        log::info!("error {:.3e} at {} steps, observed order {:.3}", c.error_coarse, c.steps, c.order);
        Some(Convergence {
            steps: c.steps,
            error_coarse: c.error_coarse,
            error_fine: c.error_fine,
            order: c.order,
            passed,
        })
    };
    let failed = convergence.as_ref().is_some_and(|c| !c.passed);
    write_json(
        &dir.join("evolve.json"),
        &EvolveDocument {
            schema: EVOLVE_SCHEMA,
            config: cfg,
            t0: e.t0.clone(),
            t1: e.t1.clone(),
            steps: e.steps,
            terminal_gap,
            convergence,
            tower_levels,
        },
    )?;
    if failed {
        return Err(CliError::Failed("integration error or order outside the configured bounds".into()));
    }
    Ok(())
}
