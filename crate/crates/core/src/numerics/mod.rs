//! Scalar arithmetic in two modes, special functions, determinants and
//! half-line quadrature.

mod dual;
pub mod matrix;
pub mod quad;
mod scalar;
pub mod special;

pub use dual::Dual;
pub use matrix::{
    det, det_t_derivative, det_with_report, jacobi_identity_residual, minor_det, with_escalation, DenseMatrix,
    Determinant,
};
pub use quad::{integrate_halfline, HalfLineIntegrand, QuadResult};
pub use rug::Rational;
pub use scalar::{digits_to_bits, parse_rational, Field, Mode, Scalar};
pub use special::{gamma, pochhammer};
