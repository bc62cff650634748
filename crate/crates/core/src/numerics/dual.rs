use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::{Field, Scalar};

/// First-order jet `value + deriv·ε` with `ε² = 0`.
///
/// Feeding moments as `Dual(m, ∂ₜm)` through any rational expression yields
/// its exact time derivative alongside the value.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<F = Scalar> {
    pub value: F,
    pub deriv: F,
}

impl<F: Field> Dual<F> {
    pub fn new(value: F, deriv: F) -> Self {
        Dual { value, deriv }
    }

    pub fn constant(value: F) -> Self {
        let deriv = value.zero_like();
        Dual { value, deriv }
    }
}

impl<F: Field> Add for Dual<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual { value: self.value + rhs.value, deriv: self.deriv + rhs.deriv }
    }
}

impl<'a, F: Field> Add<&'a Dual<F>> for Dual<F> {
    type Output = Self;
    fn add(self, rhs: &'a Self) -> Self {
        Dual { value: self.value + &rhs.value, deriv: self.deriv + &rhs.deriv }
    }
}

impl<F: Field> Sub for Dual<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual { value: self.value - rhs.value, deriv: self.deriv - rhs.deriv }
    }
}

impl<'a, F: Field> Sub<&'a Dual<F>> for Dual<F> {
    type Output = Self;
    fn sub(self, rhs: &'a Self) -> Self {
        Dual { value: self.value - &rhs.value, deriv: self.deriv - &rhs.deriv }
    }
}

impl<'a, F: Field> Mul<&'a Dual<F>> for Dual<F> {
    type Output = Self;
    fn mul(self, rhs: &'a Self) -> Self {
        let deriv = self.deriv * &rhs.value + self.value.clone() * &rhs.deriv;
        Dual { value: self.value * &rhs.value, deriv }
    }
}

impl<F: Field> Mul for Dual<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self * &rhs
    }
}

impl<'a, F: Field> Div<&'a Dual<F>> for Dual<F> {
    type Output = Self;
    fn div(self, rhs: &'a Self) -> Self {
        let value = self.value / &rhs.value;
        let deriv = (self.deriv - value.clone() * &rhs.deriv) / &rhs.value;
        Dual { value, deriv }
    }
}

impl<F: Field> Div for Dual<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self / &rhs
    }
}

impl<F: Field> Neg for Dual<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { value: -self.value, deriv: -self.deriv }
    }
}

impl<F: Field> Field for Dual<F> {
    fn int_like(&self, v: i64) -> Self {
        Dual::constant(self.value.int_like(v))
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn primal(&self) -> &Scalar {
        self.value.primal()
    }
}
