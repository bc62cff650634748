//! The `(k₁+k₂+2)`-term recurrences and their compatibility system.
//!
//! Coefficients come straight from the family: `aₙ` from single-moment
//! integrals of `Pₙ`, `η_{n,α}` from pairings against `Q_α`. Time
//! derivatives are exact, obtained by running the same code over moment
//! jets (`m + ε∂ₜm`, with `∂ₜm` from the shift rule).

mod coeffs;
mod gct;
mod spectral;

pub use coeffs::{
    a_coeff, a_hat_coeff, dual_recurrence_residual, eta_coeff, eta_hat_coeff, recurrence_report, recurrence_residual,
    required_n_max, RecurrenceData,
};
pub use gct::{
    dual_gct_residual, e_coeff, evolution_data, evolution_residual, first_interior_site, gct_residual, gct_site, jets,
    solve_xi_chain, EvolutionData, GctResidual, Jets,
};
pub use spectral::{build_spectral_operator, SpectralOperator};

#[cfg(test)]
mod tests;
