//! Half-line quadrature by the exp-sinh (double exponential) rule.
//!
//! With `x = exp(π/2·sinh t)` the integral `∫₀^∞ f(x) dx` becomes
//! `∫ f(x(t)) x'(t) dt` over the real line, whose integrand decays double
//! exponentially at both ends; the trapezoidal rule on it converges
//! geometrically in `1/h` and copes with endpoint singularities of the form
//! `x^c`, `c > −1`. Halving `h` reuses every previous node.

use std::f64::consts::{FRAC_PI_2, LN_10};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::scalar::{digits_to_bits, Mode, Scalar};
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 32;
const FIRST_LEVEL: u32 = 2;
const MAX_LEVEL: u32 = 12;

/// The integrand `x^power · poly(x) · e^{−rate·x}` on `(0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfLineIntegrand {
    #[serde(with = "crate::serde_rational")]
    pub power: Rational,
    #[serde(with = "crate::serde_rational")]
    pub rate: Rational,
    /// Coefficients of `1, x, x², …`.
    #[serde(with = "crate::serde_rational::vec")]
    pub poly: Vec<Rational>,
}

impl HalfLineIntegrand {
    /// `x^power e^{−x}`.
    pub fn gamma_weight(power: Rational) -> Self {
        HalfLineIntegrand { power, rate: Rational::from(1), poly: vec![Rational::from(1)] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.power <= -1 {
            return Err(Error::Domain(format!("x^{} is not integrable at 0", self.power)));
        }
        if self.rate.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::Domain(format!("decay rate {} must be positive", self.rate)));
        }
        if self.poly.iter().all(|c| c.cmp0() == std::cmp::Ordering::Equal) {
            return Err(Error::Domain("zero polynomial factor".into()));
        }
        Ok(())
    }

    /// The same integrand multiplied by `x^shift`, with the rate reduced by `dt`.
    pub fn shifted(&self, shift: &Rational, dt: &Rational) -> Self {
        HalfLineIntegrand {
            power: Rational::from(&self.power + shift),
            rate: Rational::from(&self.rate - dt),
            poly: self.poly.clone(),
        }
    }

    pub fn eval(&self, x: &Float) -> Float {
        let prec = x.prec();
        let mut p = Float::new(prec);
        for c in self.poly.iter().rev() {
            p *= x;
            p += c;
        }
        let pw = Float::with_val(prec, &self.power);
        let mut v = Float::with_val(prec, x.pow(&pw));
        v *= p;
        let mut e = Float::with_val(prec, &self.rate * x);
        e = -e;
        v * e.exp()
    }

    /// Closed form `Σ_k p_k Γ(power+k+1) / rate^{power+k+1}`.
    pub fn exact_integral(&self, mode: Mode) -> Result<Scalar> {
        let mut acc = mode.zero();
        for (k, c) in self.poly.iter().enumerate() {
            if c.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let s = Rational::from(&self.power + (k as u32 + 1));
            let g = super::special::gamma(&s, mode)?;
            let r = mode.rational(&self.rate).pow_rational(&-s)?;
            acc = acc + mode.rational(c) * g * r;
        }
        Ok(acc)
    }

    /// A `t` window outside of which the transformed integrand is below
    /// `10^{−digits}` relative to the bulk.
    pub fn t_window(&self, digits: u32) -> (f64, f64) {
        let target = (digits as f64 + 10.0) * LN_10;
        let c = self.power.to_f64();
        let lam = self.rate.to_f64();
        let deg = self.poly.len().saturating_sub(1) as f64;
        // ∫₀^x_min x^c dx ≈ x_min^{c+1}
        let ln_xmin = -target / (c + 1.0);
        let mut x_max = (target / lam).max(1.0);
        for _ in 0..3 {
            x_max = ((target + (c + deg + 1.0).max(0.0) * x_max.ln()) / lam).max(1.0);
        }
        (t_of_ln_x(ln_xmin), t_of_ln_x(x_max.ln()))
    }
}

fn t_of_ln_x(ln_x: f64) -> f64 {
    (ln_x / FRAC_PI_2).asinh()
}

/// Exp-sinh nodes and weights at step `2^{−level}` on `[t_lo, t_hi]`;
/// `odd_only` keeps the nodes that are new relative to the previous level.
/// Weights include the step.
pub fn expsinh_nodes(prec: u32, level: u32, t_lo: f64, t_hi: f64, odd_only: bool) -> Vec<(Float, Float)> {
    let steps_per_unit = 1i64 << level;
    let k_lo = (t_lo * steps_per_unit as f64).floor() as i64;
    let k_hi = (t_hi * steps_per_unit as f64).ceil() as i64;
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let mut out = Vec::new();
    for k in k_lo..=k_hi {
        if odd_only && k % 2 == 0 {
            continue;
        }
        let t = Float::with_val(prec, k) >> level;
        let (sh, ch) = t.sinh_cosh(Float::new(prec));
        let x = Float::with_val(prec, &half_pi * &sh).exp();
        let mut w = Float::with_val(prec, &half_pi * &ch);
        w *= &x;
        w >>= level;
        out.push((x, w));
    }
    out
}

/// Outcome of a converged quadrature.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Scalar,
    pub level: u32,
    pub nodes: usize,
}

/// `∫₀^∞ f(x) dx` with step halving until two successive levels agree to
/// `digits/2` significant digits. `f` receives nodes at `digits` plus guard
/// bits of precision.
pub fn integrate_halfline_fn(
    mut f: impl FnMut(&Float) -> Float,
    t_window: (f64, f64),
    digits: u32,
) -> Result<QuadResult> {
    let prec = digits_to_bits(digits) + GUARD_BITS;
    let tol = Float::with_val(prec, 10).pow(-(digits as i32) / 2 - 1);
    let mut sum = Float::new(prec);
    let mut prev: Option<Float> = None;
    let mut nodes = 0usize;
    for level in FIRST_LEVEL..=MAX_LEVEL {
        let fresh = expsinh_nodes(prec, level, t_window.0, t_window.1, level > FIRST_LEVEL);
        nodes += fresh.len();
        let mut part = Float::new(prec);
        for (x, w) in &fresh {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::Quadrature(format!("integrand not finite at x = {}", x.to_f64())));
            }
            part += v * w;
        }
        // Weights carry the current step, so the old sum is halved.
        sum >>= 1;
        if level == FIRST_LEVEL {
            sum = Float::with_val(prec, &part);
        } else {
            sum += &part;
        }
        if let Some(p) = &prev {
            let gap = Float::with_val(prec, &sum - p).abs();
            let scale = Float::with_val(prec, sum.abs_ref());
            if gap <= Float::with_val(prec, &tol * &scale) {
                let value = Scalar::Real(Float::with_val(digits_to_bits(digits), &sum));
                return Ok(QuadResult { value, level, nodes });
            }
        }
        prev = Some(sum.clone());
    }
    Err(Error::Quadrature(format!("no agreement to {} digits after level {MAX_LEVEL}", digits / 2)))
}

/// `∫₀^∞ x^c·poly(x)·e^{−λx} dx` at `digits` precision.
pub fn integrate_halfline(f: &HalfLineIntegrand, digits: u32) -> Result<QuadResult> {
    f.validate()?;
    integrate_halfline_fn(|x| f.eval(x), f.t_window(digits), digits)
}

/// Double-precision exp-sinh rule at step `h` over `[t_lo, t_hi]`, returned
/// as `(x, w)` pairs with the step folded into `w`.
pub fn expsinh_rule_f64(h: f64, t_lo: f64, t_hi: f64) -> Vec<(f64, f64)> {
    let k_lo = (t_lo / h).floor() as i64;
    let k_hi = (t_hi / h).ceil() as i64;
    (k_lo..=k_hi)
        .map(|k| {
            let t = k as f64 * h;
            let x = (FRAC_PI_2 * t.sinh()).exp();
            (x, h * FRAC_PI_2 * t.cosh() * x)
        })
        .filter(|&(x, w)| x > 0.0 && x.is_finite() && w.is_finite())
        .collect()
}
