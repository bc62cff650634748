#![allow(non_snake_case)]

use rug::Rational;

use super::poly::{BiorthPoly, PolyKind};
use crate::error::{Error, Result};
use crate::moments::{ModelParams, Side, Weight};
use crate::numerics::{gamma, pochhammer, special::factorial, Mode, Scalar};

/// `(a, b, θ₁, θ₂)` as seen from `side`: the `y` side swaps the roles.
fn oriented(params: &ModelParams, side: Side) -> Result<(Rational, Rational, Rational, Rational)> {
    let (a, b) = params.exponents()?;
    Ok(match side {
        Side::X => (a.clone(), b.clone(), params.theta1(), params.theta2()),
        Side::Y => (b.clone(), a.clone(), params.theta2(), params.theta1()),
    })
}

/// `(1+a+b+θl)/θ'` as an exact rational.
fn alpha(a: &Rational, b: &Rational, th: &Rational, th_other: &Rational, l: usize) -> Rational {
    (Rational::from(a + b) + Rational::from(th * l as u32) + 1u32) / th_other.clone()
}

/// `c_{n,l} = (−1)^l ((1+a+b+θ₁l)/θ₂)ₙ / (l!(n−l)!)` seen from `side`.
fn jacobi_coeffs(n: usize, params: &ModelParams, side: Side) -> Result<Vec<Rational>> {
    let (a, b, th, tho) = oriented(params, side)?;
    let exact = Mode::Exact;
    Ok((0..=n)
        .map(|l| {
            let poch = pochhammer(&exact.rational(&alpha(&a, &b, &th, &tho, l)), n);
            let denom = Rational::from(factorial(l as u32) * factorial((n - l) as u32));
            let v = poch.as_rational().expect("exact").clone() / denom;
            if l % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect())
}

fn jacobi_poly(n: usize, params: &ModelParams, side: Side, kind: PolyKind) -> Result<BiorthPoly> {
    let mode = params.mode;
    let coeffs = jacobi_coeffs(n, params, side)?.iter().map(|c| mode.rational(c)).collect();
    Ok(BiorthPoly { kind, side, n, k: params.k(side), coeffs })
}

/// `ξₙ(x) = Σ c_{n,i} x^{θ₁i}`.
pub fn jacobi_xi(n: usize, params: &ModelParams) -> Result<BiorthPoly> {
    jacobi_poly(n, params, Side::X, PolyKind::JacobiXi)
}

/// `ψₙ(y) = Σ d_{n,j} y^{θ₂j}`.
pub fn jacobi_psi(n: usize, params: &ModelParams) -> Result<BiorthPoly> {
    jacobi_poly(n, params, Side::Y, PolyKind::JacobiPsi)
}

/// `∫₀¹ ξₙ(x)ψ_m(x) x^{a+b} dx = Σ c_{n,i}d_{m,j}/(1+a+b+θ₁i+θ₂j)`.
pub fn jacobi_biorth_product(xi: &BiorthPoly, psi: &BiorthPoly, params: &ModelParams) -> Result<Scalar> {
    let (a, b) = params.exponents()?;
    let mut acc = params.mode.zero();
    for (i, c) in xi.coeffs.iter().enumerate() {
        for (j, d) in psi.coeffs.iter().enumerate() {
            let den = Rational::from(a + b) + (params.theta1() * i as u32) + (params.theta2() * j as u32) + 1u32;
            acc = acc + c.clone() * d / params.mode.rational(&den);
        }
    }
    Ok(acc)
}

/// `h̃ₙ = 1/(1+a+b+(θ₁+θ₂)n)`.
pub fn jacobi_h_tilde(n: usize, params: &ModelParams) -> Result<Scalar> {
    let (a, b) = params.exponents()?;
    let den = Rational::from(a + b) + ((params.theta1() + params.theta2()) * n as u32) + 1u32;
    Ok(params.mode.rational(&den.recip()))
}

fn require_laguerre(params: &ModelParams) -> Result<()> {
    match params.weight {
        Weight::Laguerre { .. } => Ok(()),
        _ => Err(Error::Domain("closed forms need the Laguerre weight".into())),
    }
}

fn hat(n: usize, params: &ModelParams, side: Side) -> Result<BiorthPoly> {
    require_laguerre(params)?;
    let (a, _, th, _) = oriented(params, side)?;
    let coeffs = jacobi_coeffs(n, params, side)?
        .iter()
        .enumerate()
        .map(|(l, c)| {
            let g = gamma(&((&a + Rational::from(&th * l as u32)) + 1u32), params.mode)?;
            Ok(params.mode.rational(c) / g)
        })
        .collect::<Result<_>>()?;
    let kind = if side == Side::X { PolyKind::HatP } else { PolyKind::HatQ };
    Ok(BiorthPoly { kind, side, n, k: params.k(side), coeffs })
}

/// `hatPₙ` with coefficients `c_{n,l}/Γ(1+a+θ₁l)`.
pub fn hat_P(n: usize, params: &ModelParams) -> Result<BiorthPoly> {
    hat(n, params, Side::X)
}

/// `hatQₙ` with coefficients `d_{n,l}/Γ(1+b+θ₂l)`.
pub fn hat_Q(n: usize, params: &ModelParams) -> Result<BiorthPoly> {
    hat(n, params, Side::Y)
}

/// The scalar turning `hatPₙ` (or `hatQₙ`) into the monic `Pₙ` (`Qₙ`):
/// `Γ(1+a+θ₁n)/c_{n,n}`.
pub fn monic_factor(n: usize, side: Side, params: &ModelParams) -> Result<Scalar> {
    require_laguerre(params)?;
    let (a, _, th, _) = oriented(params, side)?;
    let g = gamma(&((&a + Rational::from(&th * n as u32)) + 1u32), params.mode)?;
    let lead = jacobi_coeffs(n, params, side)?.pop().expect("n+1 coefficients");
    Ok(g / params.mode.rational(&lead))
}

/// Closed-form `hₙ` as a ratio of Γ values, including the time scaling
/// `(1−t)^{−(1+a+b+(θ₁+θ₂)n)}`.
pub fn laguerre_h(n: usize, params: &ModelParams) -> Result<Scalar> {
    require_laguerre(params)?;
    let mode = params.mode;
    let (a, b) = params.exponents()?;
    let (th1, th2) = (params.theta1(), params.theta2());
    let g = |x: Rational| gamma(&x, mode);
    let al = alpha(a, b, &th1, &th2, n);
    let be = alpha(b, a, &th2, &th1, n);
    let nfact = mode.integer(&factorial(n as u32));
    let num = nfact.clone()
        * nfact
        * g((a + Rational::from(&th1 * n as u32)) + 1u32)?
        * g((b + Rational::from(&th2 * n as u32)) + 1u32)?
        * g(al.clone())?
        * g(be.clone())?;
    let den = g(al + n as u32)? * g(be + n as u32)?;
    let e = Rational::from(a + b) + ((th1 + th2) * n as u32) + 1u32;
    let s = mode.rational(&(Rational::from(1) - &params.t));
    Ok(num / den / mode.rational(&e) * s.pow_rational(&-e)?)
}

fn residue_terms(n: usize, params: &ModelParams, side: Side) -> Result<Vec<Scalar>> {
    require_laguerre(params)?;
    let mode = params.mode;
    let (a, b, th, tho) = oriented(params, side)?;
    (0..=n)
        .map(|l| {
            // Res_{u=−l} Γ(u) = (−1)^l / l!
            let res = mode.integer(&factorial(l as u32));
            let res = if l % 2 == 1 { -mode.one() / res } else { mode.one() / res };
            let al = alpha(&a, &b, &th, &tho, l);
            let num = gamma(&(al.clone() + n as u32), mode)?;
            let den = gamma(&Rational::from(1 + n - l), mode)?
                * gamma(&((&a + Rational::from(&th * l as u32)) + 1u32), mode)?
                * gamma(&al, mode)?;
            Ok(res * num / den)
        })
        .collect()
}

/// Residues of the contour integrand at `u = 0, −1, …, −n`, each the
/// coefficient of `x^{θ₁l}`.
pub fn residue_terms_hatP(n: usize, params: &ModelParams) -> Result<Vec<Scalar>> {
    residue_terms(n, params, Side::X)
}

fn residue_eval(n: usize, x: &Scalar, params: &ModelParams, side: Side) -> Result<Scalar> {
    if x.signum() <= 0 {
        return Err(Error::Domain(format!("contour representation needs x > 0, got {x}")));
    }
    let y = x.root(params.k(side))?;
    let mut acc = params.mode.zero();
    let mut pw = params.mode.one();
    for term in residue_terms(n, params, side)? {
        acc = acc + term * &pw;
        pw = pw * &y;
    }
    Ok(acc)
}

/// `hatPₙ(x)` as the sum of residues of the contour integrand.
pub fn residue_eval_hatP(n: usize, x: &Scalar, params: &ModelParams) -> Result<Scalar> {
    residue_eval(n, x, params, Side::X)
}

pub fn residue_eval_hatQ(n: usize, y: &Scalar, params: &ModelParams) -> Result<Scalar> {
    residue_eval(n, y, params, Side::Y)
}
