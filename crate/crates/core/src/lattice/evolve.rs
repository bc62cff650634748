use std::collections::BTreeMap;

use rug::Rational;

use super::residuals::nonlinear_rhs;
use super::tau::{lattice_table, tau_jets};
use super::vars::{lattice_state, vars_from_jets, LatticeState, LatticeVars};
use crate::error::{Error, Result};
use crate::moments::ModelParams;
use crate::numerics::Scalar;

/// Lattice variables just outside the window: site `n_lo−1` on the left,
/// `n_hi+1` on the right.
#[derive(Clone, Debug)]
pub struct Boundary {
    pub left: LatticeVars,
    pub right: LatticeVars,
}

/// Boundary values read off the determinants at each requested time.
pub fn tau_fed_boundary(
    params: &ModelParams,
    n_lo: usize,
    n_hi: usize,
) -> impl FnMut(&Rational) -> Result<Boundary> + '_ {
    let mut cache: BTreeMap<Rational, Boundary> = BTreeMap::new();
    move |t: &Rational| {
        if let Some(b) = cache.get(t) {
            return Ok(b.clone());
        }
        let table = lattice_table(&params.at_time(t.clone())?, n_hi + 1, 1)?;
        let jets = tau_jets(n_hi + 2, &table)?;
        let b = Boundary { left: vars_from_jets(n_lo - 1, &jets)?.0, right: vars_from_jets(n_hi + 1, &jets)?.0 };
        cache.insert(t.clone(), b.clone());
        Ok(b)
    }
}

fn site(state: &[Scalar], n_lo: usize, k: usize) -> LatticeVars {
    let v = &state[5 * k..5 * k + 5];
    LatticeVars {
        n: n_lo + k,
        a: Some(v[0].clone()),
        b: v[1].clone(),
        b_hat: v[2].clone(),
        c: v[3].clone(),
        c_hat: v[4].clone(),
    }
}

fn rhs(y: &[Scalar], n_lo: usize, b: &Boundary) -> Result<Vec<Scalar>> {
    let len = y.len() / 5;
    let sites: Vec<LatticeVars> = (0..len).map(|k| site(y, n_lo, k)).collect();
    let mut out = Vec::with_capacity(y.len());
    for k in 0..len {
        let prev = if k == 0 { &b.left } else { &sites[k - 1] };
        let next = if k + 1 == len { &b.right } else { &sites[k + 1] };
        out.extend(nonlinear_rhs(prev, &sites[k], next)?);
    }
    Ok(out)
}

fn axpy(y: &[Scalar], h: &Scalar, k: &[Scalar]) -> Vec<Scalar> {
    y.iter().zip(k).map(|(a, b)| a.clone() + h.clone() * b).collect()
}

/// Values beyond this magnitude count as a blow-up.
const BLOWUP_LOG10: f64 = 100.0;

#[derive(Clone, Debug)]
pub struct EvolveResult {
    /// The state after every step, starting with the input.
    pub trajectory: Vec<LatticeState>,
}

impl EvolveResult {
    pub fn terminal(&self) -> &LatticeState {
        self.trajectory.last().expect("trajectory holds the initial state")
    }
}

/// Classical fourth-order Runge–Kutta on the nonlinear system over the
/// window of `state`, from `state.t` to `t1` in `steps` equal steps. The
/// edge neighbours come from `boundary` at every stage time.
pub fn evolve_nonlinear(
    state: &LatticeState,
    t1: &Rational,
    steps: usize,
    boundary: &mut impl FnMut(&Rational) -> Result<Boundary>,
) -> Result<EvolveResult> {
    if state.is_empty() {
        return Err(Error::Shape("empty lattice window".into()));
    }
    let t0 = state.t.clone();
    if *t1 == t0 {
        return Ok(EvolveResult { trajectory: vec![state.clone()] });
    }
    if steps == 0 {
        return Err(Error::Domain("a non-empty interval needs at least one step".into()));
    }
    let mode = state.a[0].mode();
    let h_r = Rational::from(t1 - &t0) / steps as u32;
    let half_r = Rational::from(&h_r / 2u32);
    let (h, half) = (mode.rational(&h_r), mode.rational(&half_r));
    let sixth = mode.ratio(1, 6);
    let n_lo = state.n_lo;
    let mut y = state.flatten();
    let mut t = t0;
    let mut trajectory = vec![state.clone()];
    for _ in 0..steps {
        let fail = |t: &Rational, e: Error| Error::Integration { last_good_t: t.to_string(), reason: e.to_string() };
        let mid = Rational::from(&t + &half_r);
        let end = Rational::from(&t + &h_r);
        let (b0, bm, b1) = (boundary(&t)?, boundary(&mid)?, boundary(&end)?);
        let k1 = rhs(&y, n_lo, &b0).map_err(|e| fail(&t, e))?;
        let k2 = rhs(&axpy(&y, &half, &k1), n_lo, &bm).map_err(|e| fail(&t, e))?;
        let k3 = rhs(&axpy(&y, &half, &k2), n_lo, &bm).map_err(|e| fail(&t, e))?;
        let k4 = rhs(&axpy(&y, &h, &k3), n_lo, &b1).map_err(|e| fail(&t, e))?;
        let next: Vec<Scalar> = (0..y.len())
            .map(|i| {
                let two = y[i].int_like(2);
                let s = k1[i].clone() + two.clone() * &k2[i] + two * &k3[i] + &k4[i];
                y[i].clone() + h.clone() * sixth.clone() * s
            })
            .collect();
        if let Some(bad) = next.iter().find(|v| !v.is_finite() || v.log10_abs() > BLOWUP_LOG10) {
            return Err(fail(&t, Error::Domain(format!("value blew up to {}", bad.to_display(12)))));
        }
        y = next;
        t = end;
        trajectory.push(LatticeState::from_flat(n_lo, t.clone(), &y));
    }
    Ok(EvolveResult { trajectory })
}

/// Step-halving study against the determinant trajectory.
#[derive(Clone, Debug)]
pub struct OrderCheck {
    pub steps: usize,
    /// Max-norm terminal error at `steps` and `2·steps`.
    pub error_coarse: f64,
    pub error_fine: f64,
    /// `log2(error_coarse/error_fine)`.
    pub order: f64,
    pub coarse: LatticeState,
    pub reference: LatticeState,
}

/// Integrates the window from `params.t` to `t1` at `steps` and `2·steps`
/// and compares both terminal states with the tau-function state at `t1`.
pub fn rk4_order_check(
    params: &ModelParams,
    n_lo: usize,
    n_hi: usize,
    t1: &Rational,
    steps: usize,
) -> Result<OrderCheck> {
    let start = lattice_state(n_lo, n_hi, &lattice_table(params, n_hi + 1, 1)?)?;
    let reference = lattice_state(n_lo, n_hi, &lattice_table(&params.at_time(t1.clone())?, n_hi + 1, 1)?)?;
    let mut boundary = tau_fed_boundary(params, n_lo, n_hi);
    let coarse = evolve_nonlinear(&start, t1, steps, &mut boundary)?.terminal().clone();
    let fine = evolve_nonlinear(&start, t1, 2 * steps, &mut boundary)?.terminal().clone();
    let (lc, lf) = (coarse.max_gap_log10(&reference), fine.max_gap_log10(&reference));
    Ok(OrderCheck {
        steps,
        error_coarse: 10f64.powf(lc),
        error_fine: 10f64.powf(lf),
        order: (lc - lf) / std::f64::consts::LOG10_2,
        coarse,
        reference,
    })
}
