use rug::Rational;

use super::bordered::{moments, shifted, Bordered, ColSpec, RowSpec};
use crate::error::{Error, Result};
use crate::moments::{build_table, ModelParams, MomentTable};
use crate::numerics::Scalar;

use ColSpec as C;
use RowSpec as R;

/// The lattice works with `θ₁ = θ₂ = 1` and a time flow.
pub fn check_lattice_table(table: &MomentTable) -> Result<()> {
    let p = table.params();
    if p.k1 != 1 || p.k2 != 1 {
        return Err(Error::Domain(format!("the lattice needs k1 = k2 = 1, got ({}, {})", p.k1, p.k2)));
    }
    if !p.has_time_flow() {
        return Err(Error::Domain("the lattice needs weights with a time flow".into()));
    }
    if table.deriv_depth() == 0 {
        return Err(Error::Domain("the lattice needs a table with derivative depth ≥ 1".into()));
    }
    Ok(())
}

/// A table large enough for every lattice quantity at sites `0..=n_top`,
/// including the `n+1` neighbours the nonlinear equations read.
pub fn lattice_table(params: &ModelParams, n_top: usize, depth: usize) -> Result<MomentTable> {
    let t = build_table(params, n_top + 3, depth.max(1))?;
    check_lattice_table(&t)?;
    Ok(t)
}

/// One of the determinants in the tower, identically zero where the
/// index pattern has no rows to shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TauDet {
    Zero,
    Det(Bordered),
}

impl TauDet {
    pub fn value(&self, table: &MomentTable) -> Result<Scalar> {
        match self {
            TauDet::Zero => Ok(table.mode().zero()),
            TauDet::Det(b) => b.value(table),
        }
    }

    pub fn dt(&self, table: &MomentTable) -> Result<Scalar> {
        match self {
            TauDet::Zero => Ok(table.mode().zero()),
            TauDet::Det(b) => b.dt(table),
        }
    }

    pub fn dt2(&self, table: &MomentTable) -> Result<Scalar> {
        match self {
            TauDet::Zero => Ok(table.mode().zero()),
            TauDet::Det(b) => b.dt2(table),
        }
    }
}

fn with<T>(mut v: Vec<T>, last: T) -> Vec<T> {
    v.push(last);
    v
}

fn d(rows: Vec<RowSpec>, cols: Vec<ColSpec>) -> TauDet {
    TauDet::Det(Bordered::new(rows, cols))
}

/// Determinant layouts of the tower at site `n`.
pub mod layout {
    use super::*;

    pub fn tau(n: usize) -> TauDet {
        d(moments(n, R::Moment), moments(n, C::Moment))
    }

    pub fn sigma(n: usize) -> TauDet {
        d(with(moments(n, R::Moment), R::Phi), moments(n + 1, C::Moment))
    }

    pub fn sigma_hat(n: usize) -> TauDet {
        d(moments(n + 1, R::Moment), with(moments(n, C::Moment), C::PhiHat))
    }

    pub fn xi(n: usize) -> TauDet {
        if n == 0 {
            return TauDet::Zero;
        }
        d(shifted(n, R::Moment), moments(n, C::Moment))
    }

    pub fn xi_hat(n: usize) -> TauDet {
        if n == 0 {
            return TauDet::Zero;
        }
        d(moments(n, R::Moment), shifted(n, C::Moment))
    }

    pub fn alpha(n: usize) -> TauDet {
        d(with(moments(n, R::Moment), R::Phi), with(moments(n, C::Moment), C::Moment(n + 1)))
    }

    pub fn alpha_hat(n: usize) -> TauDet {
        d(with(moments(n, R::Moment), R::Moment(n + 1)), with(moments(n, C::Moment), C::PhiHat))
    }

    pub fn beta(n: usize) -> TauDet {
        if n == 0 {
            return TauDet::Zero;
        }
        d(with(shifted(n, R::Moment), R::Phi), moments(n + 1, C::Moment))
    }

    pub fn beta_hat(n: usize) -> TauDet {
        if n == 0 {
            return TauDet::Zero;
        }
        d(moments(n + 1, R::Moment), with(shifted(n, C::Moment), C::PhiHat))
    }

    pub fn tau_tilde(n: usize) -> TauDet {
        d(with(moments(n, R::Moment), R::Phi), with(moments(n, C::Moment), C::PhiHat))
    }

    pub fn xi_tilde(n: usize) -> TauDet {
        if n == 0 {
            return TauDet::Zero;
        }
        d(with(shifted(n, R::Moment), R::Phi), with(moments(n, C::Moment), C::PhiHat))
    }

    pub fn xi_hat_tilde(n: usize) -> TauDet {
        if n == 0 {
            return TauDet::Zero;
        }
        d(with(moments(n, R::Moment), R::Phi), with(shifted(n, C::Moment), C::PhiHat))
    }
}

/// Every determinant of the tower at one site and time.
#[derive(Clone, Debug, PartialEq)]
pub struct TauFamily {
    pub n: usize,
    pub t: Rational,
    pub tau: Scalar,
    pub sigma: Scalar,
    pub sigma_hat: Scalar,
    pub xi: Scalar,
    pub xi_hat: Scalar,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub alpha_hat: Scalar,
    pub beta_hat: Scalar,
    pub tau_tilde: Scalar,
    pub xi_tilde: Scalar,
    pub xi_hat_tilde: Scalar,
}

pub fn tau_family(n: usize, table: &MomentTable) -> Result<TauFamily> {
    check_lattice_table(table)?;
    use layout::*;
    let v = |l: TauDet| l.value(table);
    Ok(TauFamily {
        n,
        t: table.params().t.clone(),
        tau: v(tau(n))?,
        sigma: v(sigma(n))?,
        sigma_hat: v(sigma_hat(n))?,
        xi: v(xi(n))?,
        xi_hat: v(xi_hat(n))?,
        alpha: v(alpha(n))?,
        beta: v(beta(n))?,
        alpha_hat: v(alpha_hat(n))?,
        beta_hat: v(beta_hat(n))?,
        tau_tilde: v(tau_tilde(n))?,
        xi_tilde: v(xi_tilde(n))?,
        xi_hat_tilde: v(xi_hat_tilde(n))?,
    })
}

/// The five lattice unknowns at one site with their exact `t`-derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct TauJet {
    pub n: usize,
    pub tau: Scalar,
    pub dtau: Scalar,
    pub sigma: Scalar,
    pub dsigma: Scalar,
    pub sigma_hat: Scalar,
    pub dsigma_hat: Scalar,
    pub xi: Scalar,
    pub dxi: Scalar,
    pub xi_hat: Scalar,
    pub dxi_hat: Scalar,
}

pub fn tau_jet(n: usize, table: &MomentTable) -> Result<TauJet> {
    check_lattice_table(table)?;
    use layout::*;
    let both = |l: TauDet| -> Result<(Scalar, Scalar)> { Ok((l.value(table)?, l.dt(table)?)) };
    let (tau, dtau) = both(tau(n))?;
    let (sigma, dsigma) = both(sigma(n))?;
    let (sigma_hat, dsigma_hat) = both(sigma_hat(n))?;
    let (xi, dxi) = both(xi(n))?;
    let (xi_hat, dxi_hat) = both(xi_hat(n))?;
    Ok(TauJet { n, tau, dtau, sigma, dsigma, sigma_hat, dsigma_hat, xi, dxi, xi_hat, dxi_hat })
}

/// Jets for sites `0..=n_top`.
pub fn tau_jets(n_top: usize, table: &MomentTable) -> Result<Vec<TauJet>> {
    (0..=n_top).map(|n| tau_jet(n, table)).collect()
}

/// `∂τ − (ξ+ξ̂)`, `∂τ + τ̃`, `∂ξ + ξ̃`, `∂ξ̂ + ξ̂̃`, `∂σ − (α+β)`,
/// `∂σ̂ − (α̂+β̂)` at site `n`.
pub fn derivative_formula_residuals(n: usize, table: &MomentTable) -> Result<[Scalar; 6]> {
    let f = tau_family(n, table)?;
    let j = tau_jet(n, table)?;
    Ok([
        j.dtau.clone() - (f.xi.clone() + &f.xi_hat),
        j.dtau + &f.tau_tilde,
        j.dxi + &f.xi_tilde,
        j.dxi_hat + &f.xi_hat_tilde,
        j.dsigma - (f.alpha + &f.beta),
        j.dsigma_hat - (f.alpha_hat + &f.beta_hat),
    ])
}

pub const DERIVATIVE_FORMULAS: [&str; 6] = [
    "dtau=xi+xi_hat",
    "dtau=-tau_tilde",
    "dxi=-xi_tilde",
    "dxi_hat=-xi_hat_tilde",
    "dsigma=alpha+beta",
    "dsigma_hat=alpha_hat+beta_hat",
];
