use rug::ops::Pow;
use rug::{Float, Rational};

use super::params::{ModelParams, Side, Weight};
use crate::error::{Error, Result};
use crate::numerics::quad::expsinh_nodes;
use crate::numerics::{digits_to_bits, gamma, DenseMatrix, HalfLineIntegrand, Mode, Scalar};

/// `I_{j,k} = Γ(1+a+θ₁(j−1))Γ(1+b+θ₂(k−1)) / (1+a+b+θ₁(j−1)+θ₂(k−1))`,
/// indices from 1, at `t = 0` regardless of `params.t`.
pub fn laguerre_moment(j: usize, k: usize, params: &ModelParams) -> Result<Scalar> {
    let Weight::Laguerre { a, b } = &params.weight else {
        return Err(Error::Domain("laguerre_moment needs the Laguerre weight".into()));
    };
    if j == 0 || k == 0 {
        return Err(Error::Domain("moment indices start at 1".into()));
    }
    let ex = params.theta1() * (j as u32 - 1);
    let ey = params.theta2() * (k as u32 - 1);
    let gx = gamma(&(Rational::from(a + &ex) + 1u32), params.mode)?;
    let gy = gamma(&(Rational::from(b + &ey) + 1u32), params.mode)?;
    let den = Rational::from(a + b) + ex + ey + 1u32;
    Ok(gx * gy / params.mode.rational(&den))
}

/// `J_{j,k}(s) = s^{−(1+a+b+θ₁(j−1)+θ₂(k−1))} I_{j,k}`, indices from 1.
pub fn time_scaled_moment(j: usize, k: usize, s: &Scalar, params: &ModelParams) -> Result<Scalar> {
    if s.signum() <= 0 {
        return Err(Error::Domain(format!("scale s = {s} must be positive")));
    }
    let (a, b) = params.exponents()?;
    let e = Rational::from(a + b) + (params.theta1() * (j as u32 - 1)) + (params.theta2() * (k as u32 - 1)) + 1u32;
    let i = laguerre_moment(j, k, params)?;
    Ok(s.pow_rational(&-e)? * i)
}

/// `∫ x^{θ₁l} dμ₁(x;t)` (side `X`) or `∫ y^{θ₂l} dμ₂(y;t)` (side `Y`).
pub fn single_moment(side: Side, l: usize, params: &ModelParams) -> Result<Scalar> {
    let theta = Rational::from((1, params.k(side)));
    let shift = Rational::from(&theta * l as u32);
    match &params.weight {
        Weight::Laguerre { a, b } => {
            if params.t >= 1 {
                return Err(Error::Domain(format!("single moment diverges at t = {}", params.t)));
            }
            let c = match side {
                Side::X => a,
                Side::Y => b,
            };
            let e = Rational::from(c + &shift) + 1u32;
            let g = gamma(&e, params.mode)?;
            let s = params.mode.rational(&(Rational::from(1) - &params.t));
            Ok(g * s.pow_rational(&-e)?)
        }
        Weight::Custom { .. } => params.density(side)?.shifted(&shift, &Rational::new()).exact_integral(params.mode),
        Weight::JacobiCore { .. } => Err(Error::Domain("the Jacobi core has no single moments".into())),
    }
}

/// `1/(1+a+b+θ₁i+θ₂j)`, indices from 0.
pub fn jacobi_core_moment(i: usize, j: usize, params: &ModelParams) -> Result<Scalar> {
    let (a, b) = params.exponents()?;
    let den = Rational::from(a + b) + (params.theta1() * i as u32) + (params.theta2() * j as u32) + 1u32;
    Ok(params.mode.rational(&den.recip()))
}

/// `∬ x^{i_exp} y^{j_exp}/(x+y) dμ₁(x;t) dμ₂(y;t)` by quadrature.
pub fn quad_moment(i_exp: &Rational, j_exp: &Rational, params: &ModelParams) -> Result<Scalar> {
    let Mode::Real { digits } = params.mode else {
        return Err(Error::Mode("quadrature moments are real mode only".into()));
    };
    let x = params.density(Side::X)?.shifted(i_exp, &Rational::new());
    let y = params.density(Side::Y)?.shifted(j_exp, &Rational::new());
    let m = kernel_split(&[x], &[y], digits)?;
    Ok(m.get(0, 0).clone())
}

/// All `m_{ij}` with exponents `θ₁i`, `θ₂j` by quadrature.
pub fn quad_bimoments(params: &ModelParams, rows: usize, cols: usize) -> Result<DenseMatrix> {
    let Mode::Real { digits } = params.mode else {
        return Err(Error::Mode("quadrature moments are real mode only".into()));
    };
    let bx = params.density(Side::X)?;
    let by = params.density(Side::Y)?;
    let xs: Vec<_> = (0..rows).map(|i| bx.shifted(&(params.theta1() * i as u32), &Rational::new())).collect();
    let ys: Vec<_> = (0..cols).map(|j| by.shifted(&(params.theta2() * j as u32), &Rational::new())).collect();
    kernel_split(&xs, &ys, digits)
}

const SPLIT_FIRST_LEVEL: u32 = 3;
const SPLIT_MAX_LEVEL: u32 = 8;

/// `M_{ij} = ∬ f_i(x) g_j(y)/(x+y) dx dy` through
/// `1/(x+y) = ∫₀^∞ e^{−s(x+y)} ds`: the inner half-line integrals are
/// tabulated on a shared node set and the outer `s` integral reuses them.
fn kernel_split(xs: &[HalfLineIntegrand], ys: &[HalfLineIntegrand], digits: u32) -> Result<DenseMatrix> {
    let work = digits + 10;
    let prec = digits_to_bits(work);
    let span = |fs: &[HalfLineIntegrand]| {
        fs.iter().map(|f| f.t_window(work)).fold((f64::MAX, f64::MIN), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    };
    let (xw, yw) = (span(xs), span(ys));
    // The outer integrand decays like s^{−(2+cx+cy)}, leaving a tail of
    // order S^{−(1+cx+cy)} beyond S.
    let min_power = |fs: &[HalfLineIntegrand]| fs.iter().map(|f| f.power.to_f64()).fold(f64::MAX, f64::min);
    let decay = 1.0 + min_power(xs) + min_power(ys);
    let ln_s_max = ((work as f64 + 10.0) * std::f64::consts::LN_10 / decay.max(0.05)).min(3000.0);
    let ln_s_min = -(work as f64 + 10.0) * std::f64::consts::LN_10;
    let to_t = |ln: f64| (ln / std::f64::consts::FRAC_PI_2).asinh();
    let sw = (to_t(ln_s_min), to_t(ln_s_max));

    let tol = Float::with_val(prec, 10).pow(-(digits as i32) / 2 - 1);
    let mut prev: Option<Vec<Float>> = None;
    for level in SPLIT_FIRST_LEVEL..=SPLIT_MAX_LEVEL {
        let xn = expsinh_nodes(prec, level, xw.0, xw.1, false);
        let yn = expsinh_nodes(prec, level, yw.0, yw.1, false);
        let sn = expsinh_nodes(prec, level, sw.0, sw.1, false);
        let tab = |fs: &[HalfLineIntegrand], nodes: &[(Float, Float)]| -> Vec<Vec<Float>> {
            fs.iter().map(|f| nodes.iter().map(|(x, w)| f.eval(x) * w).collect()).collect()
        };
        let (fx, gy) = (tab(xs, &xn), tab(ys, &yn));
        let mut acc = vec![Float::new(prec); xs.len() * ys.len()];
        for (s, ws) in &sn {
            let inner = |nodes: &[(Float, Float)], table: &[Vec<Float>]| -> Vec<Float> {
                let damp: Vec<Float> = nodes.iter().map(|(x, _)| (-Float::with_val(prec, s * x)).exp()).collect();
                table
                    .iter()
                    .map(|row| {
                        let mut sum = Float::new(prec);
                        for (v, d) in row.iter().zip(&damp) {
                            sum += Float::with_val(prec, v * d);
                        }
                        sum
                    })
                    .collect()
            };
            let f = inner(&xn, &fx);
            let g = inner(&yn, &gy);
            for (i, fi) in f.iter().enumerate() {
                let fw = Float::with_val(prec, fi * ws);
                for (j, gj) in g.iter().enumerate() {
                    acc[i * ys.len() + j] += Float::with_val(prec, &fw * gj);
                }
            }
        }
        if let Some(p) = &prev {
            let converged = acc.iter().zip(p).all(|(a, b)| {
                let gap = Float::with_val(prec, a - b).abs();
                gap <= Float::with_val(prec, &tol * &Float::with_val(prec, a.abs_ref()))
            });
            if converged {
                let out_bits = digits_to_bits(digits);
                return Ok(DenseMatrix::from_fn(xs.len(), ys.len(), |i, j| {
                    Scalar::Real(Float::with_val(out_bits, &acc[i * ys.len() + j]))
                }));
            }
        }
        prev = Some(acc);
    }
    Err(Error::Quadrature(format!(
        "kernel-split moments did not agree to {} digits by level {SPLIT_MAX_LEVEL}",
        digits / 2
    )))
}

/// Moments `m_{ij}(t)`, indices from 0, in closed form where one exists.
pub(crate) fn closed_bimoments(params: &ModelParams, rows: usize, cols: usize) -> Result<Option<DenseMatrix>> {
    let mode = params.mode;
    match &params.weight {
        Weight::Laguerre { a, b } => {
            let s = Rational::from(1) - &params.t;
            let prefactor = |c: &Rational, theta: Rational, i: usize| -> Result<Scalar> {
                let e = (c + (theta * i as u32)) + 1u32;
                gamma(&e, mode)
            };
            let rx: Vec<Scalar> = (0..rows).map(|i| prefactor(a, params.theta1(), i)).collect::<Result<_>>()?;
            let ry: Vec<Scalar> = (0..cols).map(|j| prefactor(b, params.theta2(), j)).collect::<Result<_>>()?;
            let s_mode = mode.rational(&s);
            DenseMatrix::try_from_fn(rows, cols, |i, j| {
                let e = Rational::from(a + b) + (params.theta1() * i as u32) + (params.theta2() * j as u32) + 1u32;
                let scale = s_mode.pow_rational(&-e.clone())?;
                Ok(rx[i].clone() * &ry[j] / mode.rational(&e) * scale)
            })
            .map(Some)
        }
        Weight::JacobiCore { .. } => {
            DenseMatrix::try_from_fn(rows, cols, |i, j| jacobi_core_moment(i, j, params)).map(Some)
        }
        Weight::Custom { .. } => Ok(None),
    }
}

pub(crate) fn is_positive(x: &Scalar) -> bool {
    x.signum() > 0 && x.is_finite()
}
