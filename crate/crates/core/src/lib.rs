//! Two-parameter Cauchy bi-orthogonal polynomials and the integrable
//! lattice built from their moment determinants.
//!
//! The crate computes moment tables for the Cauchy kernel `1/(x+y)`, the
//! bi-orthogonal families and their banded recurrences, the determinant
//! tower of the asymmetric lattice, and checks each identity either exactly
//! over the rationals or at a chosen decimal precision.

pub mod biorth;
pub mod error;
pub mod lattice;
pub mod moments;
pub mod numerics;
pub mod oracle;
pub mod recurrence;
pub mod report;
mod serde_rational;

pub use error::{Error, Result};
