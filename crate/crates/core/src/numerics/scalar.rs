use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Number of MPFR mantissa bits used for a working precision of `digits`
/// decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    ((digits.max(1) as f64) * LOG2_10).ceil() as u32
}

fn bits_to_digits(bits: u32) -> u32 {
    ((bits as f64) * LOG10_2).floor() as u32
}

/// Arithmetic mode of a computation context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    /// Arbitrary-size rationals, no rounding anywhere.
    Exact,
    /// Binary floating point carrying `digits` significant decimal digits.
    Real { digits: u32 },
}

impl Mode {
    pub fn real(digits: u32) -> Mode {
        Mode::Real { digits }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mode::Exact)
    }

    pub fn digits(&self) -> Option<u32> {
        match self {
            Mode::Exact => None,
            Mode::Real { digits } => Some(*digits),
        }
    }

    pub fn int(&self, v: i64) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(Rational::from(v)),
            Mode::Real { digits } => Scalar::Real(Float::with_val(digits_to_bits(*digits), v)),
        }
    }

    pub fn zero(&self) -> Scalar {
        self.int(0)
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(&self, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        self.rational(&Rational::from((num, den)))
    }

    pub fn rational(&self, q: &Rational) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(q.clone()),
            Mode::Real { digits } => Scalar::Real(Float::with_val(digits_to_bits(*digits), q)),
        }
    }

    pub fn integer(&self, z: &Integer) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(Rational::from(z)),
            Mode::Real { digits } => Scalar::Real(Float::with_val(digits_to_bits(*digits), z)),
        }
    }

    /// Real mode only: an f64 has no business entering an exact computation.
    pub fn from_f64(&self, v: f64) -> Result<Scalar> {
        match self {
            Mode::Exact => Err(Error::Mode("f64 input in exact mode".into())),
            Mode::Real { digits } => {
                if !v.is_finite() {
                    return Err(Error::Domain(format!("non-finite value {v}")));
                }
                Ok(Scalar::Real(Float::with_val(digits_to_bits(*digits), v)))
            }
        }
    }

    /// Parses `p`, `p/q` (exact) or a decimal/scientific literal (real).
    /// Exact mode also accepts terminating decimals such as `0.25`.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        match self {
            Mode::Exact => parse_rational(s).map(Scalar::Exact),
            Mode::Real { digits } => {
                let bits = digits_to_bits(*digits);
                if let Ok(q) = parse_rational(s) {
                    return Ok(Scalar::Real(Float::with_val(bits, &q)));
                }
                let parsed = Float::parse(s).map_err(|e| Error::Format(format!("{s:?}: {e}")))?;
                Ok(Scalar::Real(Float::with_val(bits, parsed)))
            }
        }
    }

    pub fn converted(&self, x: &Scalar) -> Result<Scalar> {
        match (self, x) {
            (Mode::Exact, Scalar::Exact(q)) => Ok(Scalar::Exact(q.clone())),
            (Mode::Exact, Scalar::Real(_)) => Err(Error::Mode("cannot convert a real value to exact".into())),
            (Mode::Real { digits }, Scalar::Exact(q)) => Ok(Scalar::Real(Float::with_val(digits_to_bits(*digits), q))),
            (Mode::Real { digits }, Scalar::Real(f)) => Ok(Scalar::Real(Float::with_val(digits_to_bits(*digits), f))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Real { digits } => write!(f, "real({digits})"),
        }
    }
}

/// Parses `p`, `p/q`, or a terminating decimal like `-1.25e-3` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Format("empty number".into()));
    }
    if let Ok(q) = s.parse::<Rational>() {
        return Ok(q);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| Error::Format(format!("bad exponent in {s:?}")))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(Error::Format(format!("not a number: {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let num: Integer = digits.parse().map_err(|_| Error::Format(format!("not a number: {s:?}")))?;
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from(10);
    let factor = if scale >= 0 {
        Rational::from((&ten).pow(scale))
    } else {
        Rational::from(1) / Rational::from((&ten).pow(-scale))
    };
    let mut q = Rational::from(num) * factor;
    if neg {
        q = -q;
    }
    Ok(q)
}

/// A number in one of the two arithmetic modes.
///
/// Binary operators panic when the operands come from different modes; a
/// computation context is supposed to fix its mode up front. Use
/// [`Scalar::check_same_mode`] where the operands come from outside.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Real(Float),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Real(f) => Mode::Real { digits: bits_to_digits(f.prec()) },
        }
    }

    pub fn check_same_mode(&self, other: &Scalar) -> Result<()> {
        match (self, other) {
            (Scalar::Exact(_), Scalar::Exact(_)) | (Scalar::Real(_), Scalar::Real(_)) => Ok(()),
            _ => Err(Error::Mode(format!("mixed arithmetic modes: {} and {}", self.mode(), other.mode()))),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Real(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<&Float> {
        match self {
            Scalar::Real(f) => Some(f),
            Scalar::Exact(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.cmp0() == Ordering::Equal,
            Scalar::Real(f) => f.is_zero(),
        }
    }

    /// Sign as -1, 0 or 1. NaN reports 0.
    pub fn signum(&self) -> i32 {
        let ord = match self {
            Scalar::Exact(q) => Some(q.cmp0()),
            Scalar::Real(f) => f.cmp0(),
        };
        match ord {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Real(f) => f.is_finite(),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.clone().abs()),
            Scalar::Real(f) => Scalar::Real(f.clone().abs()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64(),
            Scalar::Real(f) => f.to_f64(),
        }
    }

    /// `log10 |x|`, robust for magnitudes outside the f64 range. Zero gives
    /// negative infinity.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self {
            Scalar::Exact(q) => log10_integer(q.numer()) - log10_integer(q.denom()),
            Scalar::Real(f) => {
                let (m, e) = f.to_f64_exp();
                m.abs().log10() + e as f64 * LOG10_2
            }
        }
    }

    pub fn int_like(&self, v: i64) -> Scalar {
        match self {
            Scalar::Exact(_) => Scalar::Exact(Rational::from(v)),
            Scalar::Real(f) => Scalar::Real(Float::with_val(f.prec(), v)),
        }
    }

    pub fn rational_like(&self, q: &Rational) -> Scalar {
        match self {
            Scalar::Exact(_) => Scalar::Exact(q.clone()),
            Scalar::Real(f) => Scalar::Real(Float::with_val(f.prec(), q)),
        }
    }

    pub fn powi(&self, e: i64) -> Scalar {
        match self {
            Scalar::Exact(q) => {
                let p = Rational::from(q.pow(e.unsigned_abs() as u32));
                if e < 0 {
                    Scalar::Exact(p.recip())
                } else {
                    Scalar::Exact(p)
                }
            }
            Scalar::Real(f) => {
                let prec = f.prec();
                Scalar::Real(Float::with_val(prec, f.pow(e as i32)))
            }
        }
    }

    /// `self^e` for a rational exponent. Exact mode requires an integer
    /// exponent; a non-integer exponent requires a positive base.
    pub fn pow_rational(&self, e: &Rational) -> Result<Scalar> {
        if *e.denom() == 1 {
            let k = e.numer().to_i64().ok_or_else(|| Error::Domain("exponent too large".into()))?;
            if self.is_zero() && k < 0 {
                return Err(Error::Domain("zero to a negative power".into()));
            }
            return Ok(self.powi(k));
        }
        match self {
            Scalar::Exact(_) => Err(Error::Mode(format!("exact power with non-integer exponent {e}"))),
            Scalar::Real(f) => {
                if f.cmp0() != Some(Ordering::Greater) {
                    return Err(Error::Domain("non-integer power of a non-positive base".into()));
                }
                let prec = f.prec();
                let ef = Float::with_val(prec, e);
                Ok(Scalar::Real(Float::with_val(prec, f.pow(&ef))))
            }
        }
    }

    /// Positive `k`-th root; exact only when the input is itself a perfect power.
    pub fn root(&self, k: u32) -> Result<Scalar> {
        if k == 1 {
            return Ok(self.clone());
        }
        if self.signum() < 0 {
            return Err(Error::Domain("root of a negative number".into()));
        }
        match self {
            Scalar::Exact(q) => {
                let (n, d) = (q.numer(), q.denom());
                let rn = Integer::from(n.root_ref(k));
                let rd = Integer::from(d.root_ref(k));
                if Integer::from((&rn).pow(k)) == *n && Integer::from((&rd).pow(k)) == *d {
                    Ok(Scalar::Exact(Rational::from((rn, rd))))
                } else {
                    Err(Error::Mode(format!("{q} has no rational {k}-th root")))
                }
            }
            Scalar::Real(f) => Ok(Scalar::Real(Float::with_val(f.prec(), f.root_ref(k)))),
        }
    }

    /// Serialisation form: `p/q` in exact mode, a round-trippable decimal in
    /// real mode.
    pub fn to_repr(&self) -> String {
        match self {
            Scalar::Exact(q) => q.to_string(),
            Scalar::Real(f) => f.to_string_radix(10, None),
        }
    }

    /// Short human form for logs and CSV summaries.
    pub fn to_display(&self, digits: usize) -> String {
        match self {
            Scalar::Exact(q) => q.to_string(),
            Scalar::Real(f) => f.to_string_radix(10, Some(digits.max(2))),
        }
    }
}

fn log10_integer(z: &Integer) -> f64 {
    let (m, e) = z.to_f64_exp();
    m.abs().log10() + e as f64 * LOG10_2
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Real(x) => write!(f, "{}", x.to_string_radix(10, Some(20))),
        }
    }
}

#[cold]
fn mixed_modes() -> ! {
    panic!("arithmetic on scalars from different modes")
}

macro_rules! scalar_binop {
    ($Trait:ident, $method:ident) => {
        impl<'a> $Trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(Rational::from(a.$method(b))),
                    (Scalar::Real(a), Scalar::Real(b)) => {
                        let prec = a.prec().max(b.prec());
                        Scalar::Real(Float::with_val(prec, a.$method(b)))
                    }
                    _ => mixed_modes(),
                }
            }
        }

        impl $Trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    (Scalar::Real(a), Scalar::Real(b)) => {
                        if a.prec() >= b.prec() {
                            Scalar::Real(a.$method(b))
                        } else {
                            let prec = b.prec();
                            Scalar::Real(Float::with_val(prec, (&a).$method(&b)))
                        }
                    }
                    _ => mixed_modes(),
                }
            }
        }

        impl<'a> $Trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    (Scalar::Real(a), Scalar::Real(b)) => {
                        if a.prec() >= b.prec() {
                            Scalar::Real(a.$method(b))
                        } else {
                            let prec = b.prec();
                            Scalar::Real(Float::with_val(prec, (&a).$method(b)))
                        }
                    }
                    _ => mixed_modes(),
                }
            }
        }

        impl<'a> $Trait<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Real(f) => Scalar::Real(-f),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

/// The arithmetic the generic elimination and recurrence code needs.
///
/// Implemented by [`Scalar`] and by [`Dual`](super::Dual), so the same code
/// computes values and exact first time derivatives.
pub trait Field:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    fn int_like(&self, v: i64) -> Self;

    fn zero_like(&self) -> Self {
        self.int_like(0)
    }

    fn one_like(&self) -> Self {
        self.int_like(1)
    }

    /// Exact zero test on the primal value.
    fn is_zero(&self) -> bool;

    /// The underlying value with any derivative information stripped.
    fn primal(&self) -> &Scalar;
}

impl Field for Scalar {
    fn int_like(&self, v: i64) -> Self {
        Scalar::int_like(self, v)
    }

    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }

    fn primal(&self) -> &Scalar {
        self
    }
}
