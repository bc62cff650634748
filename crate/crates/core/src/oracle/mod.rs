//! Brute-force checks that share no code path with the moment tables.
//!
//! The matrix-integral forms of `τ`, `σ`, `σ̂`, `ξ`, `ξ̂` are integrated
//! directly in double precision with the Cauchy kernel left inside the
//! integrand, then compared against the bordered determinants. Two exact
//! algebraic identities (Andréief and a Vandermonde sum) round it off.

mod andreief;
mod vandermonde;

pub use andreief::{
    andreief_identity_check, andreief_partition, IdentityCheck, IdentityMeasure, OracleConfig, OracleLevel,
    OracleReport, Target, ORACLE_SCHEMA,
};
pub use vandermonde::vandermonde_sum_identity;

#[cfg(test)]
mod tests;
