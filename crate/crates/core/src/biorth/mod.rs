//! Bi-orthogonal families for the Cauchy pairing.
//!
//! `Pₙ` lives in powers of `x^{θ₁}`, `Qₙ` in powers of `y^{θ₂}`; both are
//! monic with `⟨Pₙ, Q_m⟩ = hₙδ_{nm}`, `hₙ = τ_{n+1}/τₙ`. They are the rows of
//! `L⁻¹` and the columns of `U⁻¹` in the unpivoted factorisation
//! `M = L·D·U` of the moment matrix, so one elimination serves every
//! degree up to `n_max`. The Laguerre case also has closed forms through a
//! rational Jacobi-type system on `[0,1]`.

mod closed;
mod family;
mod poly;

pub use closed::{
    hat_P, hat_Q, jacobi_biorth_product, jacobi_h_tilde, jacobi_psi, jacobi_xi, laguerre_h, monic_factor,
    residue_eval_hatP, residue_eval_hatQ, residue_terms_hatP,
};
pub use family::{cauchy_P, cauchy_Q, cauchy_family, inner_product, orthogonality_report, pairing, CauchyFamily};
pub use poly::{BiorthPoly, PolyDocument, PolyKind};

#[cfg(test)]
mod tests;
