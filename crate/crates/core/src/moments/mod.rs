//! Moment tables for the Cauchy kernel `1/(x+y)`.
//!
//! `m_{ij}(t) = ∬ x^{θ₁i} y^{θ₂j}/(x+y) dμ₁(x;t) dμ₂(y;t)` with
//! `dμ(·;t) = e^{t·}dμ`, so `∂ₜm_{ij} = m_{i+k₁,j} + m_{i,j+k₂}`. Tables are
//! built once with a declared derivative depth and are immutable afterwards.

mod closed;
mod params;
mod table;

pub use closed::{jacobi_core_moment, laguerre_moment, quad_bimoments, quad_moment, single_moment, time_scaled_moment};
pub use params::{ModelParams, Side, Weight};
pub use table::{
    build_table, has_closed_form, moment_t_derivative, MomentSource, MomentTable, TableDocument, TimeJet, Transposed,
    TABLE_SCHEMA,
};
