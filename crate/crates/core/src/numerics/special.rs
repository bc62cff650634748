use std::cmp::Ordering;

use rug::{Float, Integer, Rational};

use super::scalar::{digits_to_bits, Field, Mode, Scalar};
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 32;

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Γ(x) for rational `x > 0`.
///
/// Integer arguments return `(x−1)!` in either mode. Exact mode rejects
/// non-integer arguments because the value is irrational there.
pub fn gamma(x: &Rational, mode: Mode) -> Result<Scalar> {
    if x.cmp0() != Ordering::Greater {
        return Err(Error::Domain(format!("gamma needs a positive argument, got {x}")));
    }
    if *x.denom() == 1 {
        let n = x.numer().to_u32().ok_or_else(|| Error::Domain(format!("gamma argument {x} too large")))?;
        return Ok(mode.integer(&factorial(n - 1)));
    }
    match mode {
        Mode::Exact => Err(Error::Mode(format!("gamma({x}) is not rational"))),
        Mode::Real { digits } => {
            let bits = digits_to_bits(digits);
            let wide = Float::with_val(bits + GUARD_BITS, x).gamma();
            Ok(Scalar::Real(Float::with_val(bits, wide)))
        }
    }
}

/// Rising factorial `(a)_m = a(a+1)⋯(a+m−1)`, with `(a)_0 = 1`.
pub fn pochhammer<F: Field>(a: &F, m: usize) -> F {
    let mut acc = a.one_like();
    for k in 0..m {
        acc = acc * &(a.clone() + &a.int_like(k as i64));
    }
    acc
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_at_integers_is_factorial() {
        assert_eq!(gamma(&Rational::from(1), Mode::Exact).unwrap(), Mode::Exact.one());
        assert_eq!(gamma(&Rational::from(5), Mode::Exact).unwrap(), Mode::Exact.int(24));
        assert_eq!(gamma(&Rational::from(5), Mode::real(30)).unwrap().to_f64(), 24.0);
    }

    #[test]
    fn gamma_half_integer_against_sqrt_pi() {
        let digits = 60;
        let g = gamma(&Rational::from((3, 2)), Mode::real(digits)).unwrap();
        let bits = digits_to_bits(digits);
        let pi = Float::with_val(bits + 20, rug::float::Constant::Pi);
        let expected = Scalar::Real(Float::with_val(bits, pi.sqrt() / 2u32));
        let rel = ((g.clone() - expected.clone()) / expected).abs();
        assert!(rel.log10_abs() < -58.0, "rel err 10^{}", rel.log10_abs());
        assert!((g.to_f64() - 0.886_226_925_452_758).abs() < 1e-15);
    }

    #[test]
    fn gamma_errors() {
        assert!(matches!(gamma(&Rational::from(0), Mode::real(20)), Err(Error::Domain(_))));
        assert!(matches!(gamma(&Rational::from(-3), Mode::Exact), Err(Error::Domain(_))));
        assert!(matches!(gamma(&Rational::from((1, 2)), Mode::Exact), Err(Error::Mode(_))));
    }

    #[test]
    fn pochhammer_examples() {
        let m = Mode::Exact;
        assert_eq!(pochhammer(&m.ratio(7, 3), 0), m.one());
        assert_eq!(pochhammer(&m.int(2), 3), m.int(24));
        assert_eq!(pochhammer(&m.ratio(1, 2), 2), m.ratio(3, 4));
    }

    proptest! {
        #[test]
        fn pochhammer_step(num in -50i64..50, den in 1i64..12, m in 0usize..12) {
            let mode = Mode::Exact;
            let a = mode.ratio(num, den);
            let lhs = pochhammer(&a, m + 1);
            let rhs = pochhammer(&a, m) * (a.clone() + mode.int(m as i64));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn gamma_functional_equation(num in 1i64..200, den in 1i64..9) {
            let x = Rational::from((num, den));
            let mode = Mode::real(40);
            let g = gamma(&x, mode).unwrap();
            let g1 = gamma(&(x.clone() + 1u32), mode).unwrap();
            let rel = ((g1.clone() - g * mode.rational(&x)) / g1).abs();
            prop_assert!(rel.log10_abs() < -38.0);
        }
    }
}
