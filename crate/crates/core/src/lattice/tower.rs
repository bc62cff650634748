//! Direct integration of the bilinear tower.
//!
//! The state is `(τₙ, ξₙ, ξ̂ₙ)` for `n = 1..=N`. Each right-hand side
//! evaluation rebuilds the tower level by level as truncated Taylor series
//! in `t`, starting from `τ₀ = 1`, `ξ₀ = ξ̂₀ = 0` and the single-moment
//! series of `σ₀`, `σ̂₀`. Every level is a linear first-order equation in
//! the new unknown, so its series follows from the current value alone.

use rug::Rational;

use super::tau::{lattice_table, tau_jets};
use crate::error::{Error, Result};
use crate::moments::{single_moment, ModelParams, Side};
use crate::numerics::{Mode, Scalar};

/// Truncated Taylor series `Σ c_k s^k`, `c_k = f^{(k)}/k!`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<Scalar>);

impl Jet {
    pub fn constant(c: Scalar, order: usize) -> Jet {
        let z = c.int_like(0);
        let mut v = vec![z; order + 1];
        v[0] = c;
        Jet(v)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> &Scalar {
        &self.0[0]
    }

    /// First derivative at the expansion point.
    pub fn rate(&self) -> Scalar {
        self.0.get(1).cloned().unwrap_or_else(|| self.0[0].int_like(0))
    }

    pub fn truncated(&self, order: usize) -> Jet {
        Jet(self.0[..=order.min(self.order())].to_vec())
    }

    pub fn derivative(&self) -> Jet {
        Jet((1..=self.order()).map(|k| self.0[k].int_like(k as i64) * &self.0[k]).collect())
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a.clone() + b).collect())
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a.clone() - b).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let k = self.order().min(o.order());
        Jet((0..=k)
            .map(|n| (0..=n).fold(self.0[0].int_like(0), |acc, i| acc + self.0[i].clone() * &o.0[n - i]))
            .collect())
    }

    pub fn div(&self, o: &Jet, what: &str, n: usize) -> Result<Jet> {
        if o.0[0].is_zero() {
            return Err(Error::degenerate(what, n));
        }
        let k = self.order().min(o.order());
        let mut c: Vec<Scalar> = Vec::with_capacity(k + 1);
        for m in 0..=k {
            let s = (1..=m).fold(self.0[m].clone(), |acc, i| acc - o.0[i].clone() * &c[m - i]);
            c.push(s / &o.0[0]);
        }
        Ok(Jet(c))
    }

    /// Series of `y' = p·y + q` with `y(0) = y0`, to the order `q` allows.
    pub fn solve_linear(y0: Scalar, p: &Jet, q: &Jet) -> Jet {
        let order = p.order().min(q.order()) + 1;
        let mut y = vec![y0];
        for k in 0..order {
            let s = (0..=k).fold(q.0[k].clone(), |acc, i| acc + p.0[i].clone() * &y[k - i]);
            y.push(s / y[0].int_like(k as i64 + 1));
        }
        Jet(y)
    }
}

/// One level of the tower at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerLevel {
    pub n: usize,
    pub tau: Scalar,
    pub xi: Scalar,
    pub xi_hat: Scalar,
    pub dtau: Scalar,
    pub dxi: Scalar,
    pub dxi_hat: Scalar,
}

/// Rates `(τ'ₙ, ξ'ₙ, ξ̂'ₙ)` for `n = 1..=N` from the state at time `t`.
///
/// `state` holds `τ₁..τ_N`, then `ξ₁..ξ_N`, then `ξ̂₁..ξ̂_N`.
pub fn tower_rates(params: &ModelParams, t: &Rational, state: &[Scalar]) -> Result<Vec<Scalar>> {
    let big_n = state.len() / 3;
    if big_n == 0 || state.len() != 3 * big_n {
        return Err(Error::Shape(format!("tower state of length {} is not 3·N", state.len())));
    }
    let at = params.at_time(t.clone())?;
    let order = big_n + 1;
    let mode = at.mode;
    let series = |side: Side| -> Result<Jet> {
        let mut fact = Rational::from(1);
        let mut c = Vec::with_capacity(order + 1);
        for j in 0..=order {
            if j > 0 {
                fact *= j as u32;
            }
            c.push(single_moment(side, j, &at)? * mode.rational(&Rational::from(fact.recip_ref())));
        }
        Ok(Jet(c))
    };
    let mut tau = Jet::constant(mode.one(), order);
    let mut xi = Jet::constant(mode.zero(), order);
    let mut xi_hat = xi.clone();
    let mut sigma = series(Side::Y)?;
    let mut sigma_hat = series(Side::X)?;
    let mut rates = vec![mode.zero(); 3 * big_n];
    for n in 0..big_n {
        let k = order - n;
        let (tau1, xi1, xih1) = (&state[n], &state[big_n + n], &state[2 * big_n + n]);
        let dtau = tau.derivative();
        let p = dtau.div(&tau, "τ", n)?;
        let q = sigma.mul(&sigma_hat).div(&tau, "τ", n)?;
        let t1 = Jet::solve_linear(tau1.clone(), &p, &q.truncated(k - 1)).truncated(k);
        let dt1 = t1.derivative();
        let qx = sigma.mul(&sigma_hat.derivative()).sub(&dt1.mul(&xi_hat)).add(&t1.mul(&xi_hat.derivative()));
        let qxh = sigma.derivative().mul(&sigma_hat).sub(&dt1.mul(&xi)).add(&t1.mul(&xi.derivative()));
        let x1 = Jet::solve_linear(xi1.clone(), &p, &qx.div(&tau, "τ", n)?);
        let xh1 = Jet::solve_linear(xih1.clone(), &p, &qxh.div(&tau, "τ", n)?);
        rates[n] = t1.rate();
        rates[big_n + n] = x1.rate();
        rates[2 * big_n + n] = xh1.rate();
        if n + 1 == big_n {
            break;
        }
        let s_hat = x1.derivative().mul(&t1).sub(&x1.mul(&dt1)).div(&sigma, "σ", n)?;
        let s = xh1.derivative().mul(&t1).sub(&xh1.mul(&dt1)).div(&sigma_hat, "σ̂", n)?;
        let k1 = k - 1;
        tau = t1.truncated(k1);
        xi = x1.truncated(k1);
        xi_hat = xh1.truncated(k1);
        sigma = s.truncated(k1);
        sigma_hat = s_hat.truncated(k1);
    }
    Ok(rates)
}

/// Integrated tower with the determinant values at every step.
#[derive(Clone, Debug)]
pub struct TowerTrajectory {
    pub n_max: usize,
    pub mode: Mode,
    pub times: Vec<Rational>,
    /// `levels[step][n−1]` for `n = 1..=n_max`.
    pub levels: Vec<Vec<TowerLevel>>,
}

impl TowerTrajectory {
    pub fn terminal(&self) -> &[TowerLevel] {
        self.levels.last().expect("trajectory holds the initial state")
    }
}

fn levels_of(n_max: usize, y: &[Scalar], dy: &[Scalar]) -> Vec<TowerLevel> {
    (0..n_max)
        .map(|i| TowerLevel {
            n: i + 1,
            tau: y[i].clone(),
            xi: y[n_max + i].clone(),
            xi_hat: y[2 * n_max + i].clone(),
            dtau: dy[i].clone(),
            dxi: dy[n_max + i].clone(),
            dxi_hat: dy[2 * n_max + i].clone(),
        })
        .collect()
}

/// Initial tower state at `params.t` read off the determinants.
pub fn tower_initial_state(n_max: usize, params: &ModelParams) -> Result<Vec<Scalar>> {
    let jets = tau_jets(n_max, &lattice_table(params, n_max, 1)?)?;
    let mut y = Vec::with_capacity(3 * n_max);
    y.extend(jets[1..].iter().map(|j| j.tau.clone()));
    y.extend(jets[1..].iter().map(|j| j.xi.clone()));
    y.extend(jets[1..].iter().map(|j| j.xi_hat.clone()));
    Ok(y)
}

/// RK4 on the tower from `params.t` to `t1`, started from the determinant
/// values at `params.t`.
pub fn bilinear_tower_integrate(
    n_max: usize,
    t1: &Rational,
    steps: usize,
    params: &ModelParams,
) -> Result<TowerTrajectory> {
    if n_max == 0 {
        return Err(Error::Domain("the tower needs n_max ≥ 1".into()));
    }
    let mode = params.mode;
    let mut t = params.t.clone();
    let mut y = tower_initial_state(n_max, params)?;
    let steps = if *t1 == t { 0 } else { steps };
    if steps == 0 && *t1 != t {
        return Err(Error::Domain("a non-empty interval needs at least one step".into()));
    }
    let fail = |t: &Rational, e: Error| Error::Integration { last_good_t: t.to_string(), reason: e.to_string() };
    let mut dy = tower_rates(params, &t, &y).map_err(|e| fail(&t, e))?;
    let mut times = vec![t.clone()];
    let mut levels = vec![levels_of(n_max, &y, &dy)];
    if steps == 0 {
        return Ok(TowerTrajectory { n_max, mode, times, levels });
    }
    let h_r = Rational::from(t1 - &t) / steps as u32;
    let half_r = Rational::from(&h_r / 2u32);
    let (h, half, sixth) = (mode.rational(&h_r), mode.rational(&half_r), mode.ratio(1, 6));
    let axpy = |y: &[Scalar], c: &Scalar, k: &[Scalar]| -> Vec<Scalar> {
        y.iter().zip(k).map(|(a, b)| a.clone() + c.clone() * b).collect()
    };
    for _ in 0..steps {
        let mid = Rational::from(&t + &half_r);
        let end = Rational::from(&t + &h_r);
        let k1 = dy.clone();
        let k2 = tower_rates(params, &mid, &axpy(&y, &half, &k1)).map_err(|e| fail(&t, e))?;
        let k3 = tower_rates(params, &mid, &axpy(&y, &half, &k2)).map_err(|e| fail(&t, e))?;
        let k4 = tower_rates(params, &end, &axpy(&y, &h, &k3)).map_err(|e| fail(&t, e))?;
        let next: Vec<Scalar> = (0..y.len())
            .map(|i| {
                let two = y[i].int_like(2);
                let s = k1[i].clone() + two.clone() * &k2[i] + two * &k3[i] + &k4[i];
                y[i].clone() + h.clone() * sixth.clone() * s
            })
            .collect();
        if let Some(bad) = next.iter().find(|v| !v.is_finite() || v.log10_abs() > 100.0) {
            return Err(fail(&t, Error::Domain(format!("value blew up to {}", bad.to_display(12)))));
        }
        y = next;
        t = end;
        dy = tower_rates(params, &t, &y).map_err(|e| fail(&t, e))?;
        times.push(t.clone());
        levels.push(levels_of(n_max, &y, &dy));
    }
    Ok(TowerTrajectory { n_max, mode, times, levels })
}
