//! The asymmetric lattice for `θ₁ = θ₂ = 1`.
//!
//! Every unknown is a bordered moment determinant (`τ`, `σ`, `σ̂`, `ξ`,
//! `ξ̂` and their auxiliaries), so identities are checked on the
//! determinants themselves with exact `t`-derivatives from the shift rule.
//! Conventions: `τ₀ = 1`, `ξ₀ = ξ̂₀ = 0`, `σ₀ = φ₀`, `σ̂₀ = φ̂₀`.

mod bordered;
mod evolve;
mod jacobi;
mod output;
mod residuals;
mod tau;
mod tower;
mod vars;

pub use bordered::{Bordered, ColSpec, RowSpec};
pub use evolve::{evolve_nonlinear, rk4_order_check, tau_fed_boundary, Boundary, EvolveResult, OrderCheck};
pub use jacobi::{jacobi_identity_check, jacobi_report, structural_check, JacobiApplication, StructuralCheck};
pub use output::{csv_header, state_csv_rows, summary, tower_csv_rows, CsvRow, LatticeSummary};
pub use residuals::{
    bilinear_from_jets, bilinear_report, bilinear_residuals, degeneration_report, degeneration_residuals,
    derivative_report, hirota, nonlinear_from_jets, nonlinear_report, nonlinear_residuals, nonlinear_rhs,
    symmetric_lattice4_residual, BILINEAR, DEGENERATION, NONLINEAR,
};
pub use tau::{
    check_lattice_table, derivative_formula_residuals, lattice_table, layout, tau_family, tau_jet, tau_jets, TauDet,
    TauFamily, TauJet, DERIVATIVE_FORMULAS,
};
pub use tower::{bilinear_tower_integrate, tower_initial_state, tower_rates, Jet, TowerLevel, TowerTrajectory};
pub use vars::{
    four_term_coeffs, four_term_from_vars, lattice_state, lattice_vars, vars_from_jets, vars_with_rates, FourTerm,
    LatticeState, LatticeVars,
};

#[cfg(test)]
mod tests;
