use rug::Rational;

use super::tau::{check_lattice_table, tau_jets, TauJet};
use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::numerics::Scalar;

/// `Aₙ, Bₙ, B̂ₙ, Cₙ, Ĉₙ` at one site; `A` needs `n ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVars {
    pub n: usize,
    pub a: Option<Scalar>,
    pub b: Scalar,
    pub b_hat: Scalar,
    pub c: Scalar,
    pub c_hat: Scalar,
}

/// `f/g` and its derivative.
fn quotient(f: &Scalar, df: &Scalar, g: &Scalar, dg: &Scalar) -> (Scalar, Scalar) {
    let q = f.clone() / g;
    let dq = (df.clone() - q.clone() * dg) / g;
    (q, dq)
}

fn nonzero<'a>(x: &'a Scalar, what: &str, n: usize) -> Result<&'a Scalar> {
    if x.is_zero() {
        Err(Error::degenerate(what, n))
    } else {
        Ok(x)
    }
}

/// Values and exact rates at site `n` from jets `n−1..=n+1`.
pub fn vars_from_jets(n: usize, jets: &[TauJet]) -> Result<(LatticeVars, LatticeVars)> {
    let get = |k: usize| jets.get(k).ok_or(Error::Range { what: "tau jets", index: k, available: jets.len() });
    let (j0, j1) = (get(n)?, get(n + 1)?);
    nonzero(&j0.tau, "τ", n)?;
    nonzero(&j1.tau, "τ", n + 1)?;
    let (a, da) = if n >= 1 {
        let jm = get(n - 1)?;
        let a = j1.tau.clone() * &jm.tau / (j0.tau.clone() * &j0.tau);
        let rate = j1.dtau.clone() / &j1.tau + jm.dtau.clone() / &jm.tau - j0.tau.int_like(2) * &j0.dtau / &j0.tau;
        let da = a.clone() * rate;
        (Some(a), Some(da))
    } else {
        (None, None)
    };
    let diff = |x1: &Scalar, dx1: &Scalar, x0: &Scalar, dx0: &Scalar| {
        let (q1, dq1) = quotient(x1, dx1, &j1.tau, &j1.dtau);
        let (q0, dq0) = quotient(x0, dx0, &j0.tau, &j0.dtau);
        (q1 - q0, dq1 - dq0)
    };
    let (b, db) = diff(&j1.xi, &j1.dxi, &j0.xi, &j0.dxi);
    let (b_hat, db_hat) = diff(&j1.xi_hat, &j1.dxi_hat, &j0.xi_hat, &j0.dxi_hat);
    // C = −σ_{n+1}τₙ/(σₙτ_{n+1}); log-derivative of each factor
    let c_of = |s1: &Scalar, ds1: &Scalar, s0: &Scalar, ds0: &Scalar, what: &str| -> Result<(Scalar, Scalar)> {
        nonzero(s0, what, n)?;
        let c = -(s1.clone() * &j0.tau) / (s0.clone() * &j1.tau);
        let rate = ds1.clone() * &j0.tau * s0 * &j1.tau + s1.clone() * &j0.dtau * s0 * &j1.tau
            - s1.clone() * &j0.tau * ds0 * &j1.tau
            - s1.clone() * &j0.tau * s0 * &j1.dtau;
        let den = s0.clone() * &j1.tau * s0 * &j1.tau;
        Ok((c, -(rate / den)))
    };
    let (c, dc) = c_of(&j1.sigma, &j1.dsigma, &j0.sigma, &j0.dsigma, "σ")?;
    let (c_hat, dc_hat) = c_of(&j1.sigma_hat, &j1.dsigma_hat, &j0.sigma_hat, &j0.dsigma_hat, "σ̂")?;
    Ok((LatticeVars { n, a, b, b_hat, c, c_hat }, LatticeVars { n, a: da, b: db, b_hat: db_hat, c: dc, c_hat: dc_hat }))
}

/// Values and rates for sites `0..=n_top` (reads jets through `n_top+1`).
pub fn vars_with_rates(n_top: usize, table: &MomentTable) -> Result<Vec<(LatticeVars, LatticeVars)>> {
    let jets = tau_jets(n_top + 1, table)?;
    (0..=n_top).map(|n| vars_from_jets(n, &jets)).collect()
}

pub fn lattice_vars(n: usize, table: &MomentTable) -> Result<LatticeVars> {
    check_lattice_table(table)?;
    let jets = tau_jets(n + 1, table)?;
    Ok(vars_from_jets(n, &jets)?.0)
}

/// Four-term coefficients `(a, b, c, d)` of the `P` recurrence and their
/// hatted mirror; `d` needs `n ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourTerm {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Option<Scalar>,
}

/// `(a, b, c, d)` and `(â, b̂, ĉ, d̂)` at site `n` from the lattice
/// variables at `n` and `n+1`.
pub fn four_term_from_vars(v: &LatticeVars, next: &LatticeVars) -> Result<(FourTerm, FourTerm)> {
    let a_next = next.a.clone().ok_or(Error::Range { what: "A index", index: next.n, available: 1 })?;
    let p = FourTerm {
        a: v.c_hat.clone(),
        b: v.c_hat.clone() + &next.b,
        c: -(a_next.clone()) - v.c_hat.clone() * &v.b_hat,
        d: v.a.as_ref().map(|a| -(a.clone() * &v.c_hat)),
    };
    let q = FourTerm {
        a: v.c.clone(),
        b: v.c.clone() + &next.b_hat,
        c: -a_next - v.c.clone() * &v.b,
        d: v.a.as_ref().map(|a| -(a.clone() * &v.c)),
    };
    Ok((p, q))
}

pub fn four_term_coeffs(n: usize, table: &MomentTable) -> Result<(FourTerm, FourTerm)> {
    check_lattice_table(table)?;
    let jets = tau_jets(n + 2, table)?;
    four_term_from_vars(&vars_from_jets(n, &jets)?.0, &vars_from_jets(n + 1, &jets)?.0)
}

/// The five lattice sequences on the window `n_lo..=n_hi` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    pub n_lo: usize,
    pub t: Rational,
    pub a: Vec<Scalar>,
    pub b: Vec<Scalar>,
    pub b_hat: Vec<Scalar>,
    pub c: Vec<Scalar>,
    pub c_hat: Vec<Scalar>,
}

impl LatticeState {
    pub fn n_hi(&self) -> usize {
        self.n_lo + self.a.len() - 1
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Values in the order `A, B, B̂, C, Ĉ`, site by site.
    pub fn flatten(&self) -> Vec<Scalar> {
        let mut v = Vec::with_capacity(5 * self.len());
        for k in 0..self.len() {
            v.extend([&self.a[k], &self.b[k], &self.b_hat[k], &self.c[k], &self.c_hat[k]].into_iter().cloned());
        }
        v
    }

    pub fn from_flat(n_lo: usize, t: Rational, v: &[Scalar]) -> Self {
        let pick = |o: usize| v.iter().skip(o).step_by(5).cloned().collect();
        LatticeState { n_lo, t, a: pick(0), b: pick(1), b_hat: pick(2), c: pick(3), c_hat: pick(4) }
    }

    /// Largest `log10|x − y|` over all entries.
    pub fn max_gap_log10(&self, other: &LatticeState) -> f64 {
        self.flatten()
            .iter()
            .zip(other.flatten())
            .map(|(x, y)| (x.clone() - y).log10_abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max |x − y|` as `f64`.
    pub fn max_gap(&self, other: &LatticeState) -> f64 {
        10f64.powf(self.max_gap_log10(other))
    }
}

pub fn lattice_state(n_lo: usize, n_hi: usize, table: &MomentTable) -> Result<LatticeState> {
    if n_lo == 0 || n_hi < n_lo {
        return Err(Error::Domain(format!("lattice window must satisfy 1 ≤ n_lo ≤ n_hi, got [{n_lo}, {n_hi}]")));
    }
    check_lattice_table(table)?;
    let jets = tau_jets(n_hi + 1, table)?;
    let mut s = LatticeState {
        n_lo,
        t: table.params().t.clone(),
        a: vec![],
        b: vec![],
        b_hat: vec![],
        c: vec![],
        c_hat: vec![],
    };
    for n in n_lo..=n_hi {
        let v = vars_from_jets(n, &jets)?.0;
        s.a.push(v.a.expect("n ≥ 1"));
        s.b.push(v.b);
        s.b_hat.push(v.b_hat);
        s.c.push(v.c);
        s.c_hat.push(v.c_hat);
    }
    Ok(s)
}
