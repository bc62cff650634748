use std::cmp::Ordering;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{HalfLineIntegrand, Mode};

/// The pair of measures `dμ₁(x)`, `dμ₂(y)` at `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Weight {
    /// `x^a e^{−x} dx` and `y^b e^{−y} dy`.
    Laguerre {
        #[serde(with = "crate::serde_rational")]
        a: Rational,
        #[serde(with = "crate::serde_rational")]
        b: Rational,
    },
    /// The rational core `1/(1+a+b+θ₁i+θ₂j)`: moments of the Jacobi-type
    /// system on `[0,1]` with weight `x^{a+b}`. Time independent.
    JacobiCore {
        #[serde(with = "crate::serde_rational")]
        a: Rational,
        #[serde(with = "crate::serde_rational")]
        b: Rational,
    },
    /// Arbitrary `x^c·p(x)·e^{−λx}` densities on each side.
    Custom { x: HalfLineIntegrand, y: HalfLineIntegrand },
}

/// Which of the two measures a single moment refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

/// Everything that determines a moment table.
///
/// Time enters as `dμᵢ(·;t) = e^{t·}dμᵢ`, so the Laguerre family at time
/// `t` decays like `e^{−(1−t)x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub weight: Weight,
    pub k1: u32,
    pub k2: u32,
    #[serde(with = "crate::serde_rational")]
    pub t: Rational,
    pub mode: Mode,
}

impl ModelParams {
    pub fn new(weight: Weight, k1: u32, k2: u32, t: Rational, mode: Mode) -> Result<Self> {
        let p = ModelParams { weight, k1, k2, t, mode };
        p.validate()?;
        Ok(p)
    }

    pub fn laguerre(a: Rational, b: Rational, k1: u32, k2: u32, t: Rational, mode: Mode) -> Result<Self> {
        Self::new(Weight::Laguerre { a, b }, k1, k2, t, mode)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k1 == 0 || self.k2 == 0 {
            return Err(Error::Domain(format!("k1 = {}, k2 = {}: both must be at least 1", self.k1, self.k2)));
        }
        if let Mode::Real { digits } = self.mode {
            if digits < 16 {
                return Err(Error::Domain(format!("{digits} digits is below the 16-digit minimum")));
            }
        }
        match &self.weight {
            Weight::Laguerre { a, b } => {
                if *a <= -1 || *b <= -1 {
                    return Err(Error::Domain(format!("Laguerre exponents a = {a}, b = {b} must exceed -1")));
                }
                if self.t >= 1 {
                    return Err(Error::Domain(format!("t = {} diverges: the time factor needs t < 1", self.t)));
                }
                if self.mode.is_exact() {
                    let integer = |q: &Rational| *q.denom() == 1;
                    if !(integer(a) && integer(b) && self.k1 == 1 && self.k2 == 1) {
                        return Err(Error::Mode("exact Laguerre moments need integer a, b and k1 = k2 = 1".into()));
                    }
                }
            }
            Weight::JacobiCore { a, b } => {
                if Rational::from(a + b) <= -1 {
                    return Err(Error::Domain(format!("1 + a + b must be positive (a = {a}, b = {b})")));
                }
                if self.t.cmp0() != Ordering::Equal {
                    return Err(Error::Domain("the Jacobi core carries no time dependence; t must be 0".into()));
                }
            }
            Weight::Custom { x, y } => {
                x.validate()?;
                y.validate()?;
                if Rational::from(&x.power + &y.power) <= -1 {
                    return Err(Error::Domain("the Cauchy kernel needs x-power + y-power > -1".into()));
                }
                if self.t >= x.rate || self.t >= y.rate {
                    return Err(Error::Domain(format!("t = {} reaches a decay rate; moments diverge", self.t)));
                }
                if self.mode.is_exact() {
                    return Err(Error::Mode("custom weights are evaluated by quadrature, real mode only".into()));
                }
            }
        }
        Ok(())
    }

    pub fn theta1(&self) -> Rational {
        Rational::from((1, self.k1))
    }

    pub fn theta2(&self) -> Rational {
        Rational::from((1, self.k2))
    }

    pub fn k(&self, side: Side) -> u32 {
        match side {
            Side::X => self.k1,
            Side::Y => self.k2,
        }
    }

    /// The `(a, b)` exponents of the Laguerre and Jacobi families.
    pub fn exponents(&self) -> Result<(&Rational, &Rational)> {
        match &self.weight {
            Weight::Laguerre { a, b } | Weight::JacobiCore { a, b } => Ok((a, b)),
            Weight::Custom { .. } => Err(Error::Domain("custom weights have no (a, b) exponents".into())),
        }
    }

    /// Swaps the roles of the two measures: `a ↔ b`, `k₁ ↔ k₂`, `x ↔ y`.
    pub fn transposed(&self) -> Self {
        let weight = match &self.weight {
            Weight::Laguerre { a, b } => Weight::Laguerre { a: b.clone(), b: a.clone() },
            Weight::JacobiCore { a, b } => Weight::JacobiCore { a: b.clone(), b: a.clone() },
            Weight::Custom { x, y } => Weight::Custom { x: y.clone(), y: x.clone() },
        };
        ModelParams { weight, k1: self.k2, k2: self.k1, t: self.t.clone(), mode: self.mode }
    }

    /// Both measures coincide and `k₁ = k₂`.
    pub fn is_symmetric(&self) -> bool {
        self.k1 == self.k2
            && match &self.weight {
                Weight::Laguerre { a, b } | Weight::JacobiCore { a, b } => a == b,
                Weight::Custom { x, y } => x == y,
            }
    }

    pub fn at_time(&self, t: Rational) -> Result<Self> {
        Self::new(self.weight.clone(), self.k1, self.k2, t, self.mode)
    }

    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Self::new(self.weight.clone(), self.k1, self.k2, self.t.clone(), mode)
    }

    /// Whether the moments depend on `t` through the shift rule.
    pub fn has_time_flow(&self) -> bool {
        !matches!(self.weight, Weight::JacobiCore { .. })
    }

    /// The half-line density of one side at the current time, for
    /// quadrature paths.
    pub fn density(&self, side: Side) -> Result<HalfLineIntegrand> {
        let base = match (&self.weight, side) {
            (Weight::Laguerre { a, .. }, Side::X) => HalfLineIntegrand::gamma_weight(a.clone()),
            (Weight::Laguerre { b, .. }, Side::Y) => HalfLineIntegrand::gamma_weight(b.clone()),
            (Weight::Custom { x, .. }, Side::X) => x.clone(),
            (Weight::Custom { y, .. }, Side::Y) => y.clone(),
            (Weight::JacobiCore { .. }, _) => {
                return Err(Error::Domain("the Jacobi core lives on [0,1], not the half line".into()))
            }
        };
        Ok(base.shifted(&Rational::new(), &self.t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn rejects_bad_configurations() {
        let lag = |k1, k2, t: Rational, mode| ModelParams::laguerre(q(0, 1), q(1, 1), k1, k2, t, mode);
        assert!(matches!(lag(0, 1, q(0, 1), Mode::Exact), Err(Error::Domain(_))));
        assert!(matches!(lag(1, 1, q(1, 1), Mode::Exact), Err(Error::Domain(_))));
        assert!(matches!(lag(2, 1, q(0, 1), Mode::Exact), Err(Error::Mode(_))));
        assert!(lag(2, 1, q(0, 1), Mode::real(30)).is_ok());
        assert!(lag(1, 1, q(1, 3), Mode::Exact).is_ok());
        let half = ModelParams::laguerre(q(1, 2), q(0, 1), 1, 1, q(0, 1), Mode::Exact);
        assert!(matches!(half, Err(Error::Mode(_))));
        let core = ModelParams::new(Weight::JacobiCore { a: q(1, 2), b: q(1, 3) }, 2, 3, q(0, 1), Mode::Exact);
        assert!(core.is_ok());
    }

    #[test]
    fn transposition_swaps_sides() {
        let p = ModelParams::laguerre(q(1, 2), q(1, 3), 2, 3, q(0, 1), Mode::real(30)).unwrap();
        let t = p.transposed();
        assert_eq!((t.k1, t.k2), (3, 2));
        assert_eq!(t.exponents().unwrap(), (&q(1, 3), &q(1, 2)));
        assert_eq!(t.transposed(), p);
        assert!(!p.is_symmetric());
    }

    #[test]
    fn json_round_trip() {
        let p = ModelParams::laguerre(q(1, 2), q(1, 3), 2, 3, q(1, 5), Mode::real(60)).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"1/2\""));
        let back: ModelParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
