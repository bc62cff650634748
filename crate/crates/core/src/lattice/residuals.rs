use super::tau::{
    check_lattice_table, derivative_formula_residuals, layout, tau_jet, tau_jets, TauJet, DERIVATIVE_FORMULAS,
};
use super::vars::{vars_from_jets, LatticeVars};
use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::numerics::Scalar;
use crate::report::{ResidualEntry, ResidualReport, SiteReport};

/// Hirota's bilinear derivative `D_t f·g = f′g − fg′`.
pub fn hirota(f: &Scalar, df: &Scalar, g: &Scalar, dg: &Scalar) -> Scalar {
    df.clone() * g - f.clone() * dg
}

pub const BILINEAR: [&str; 5] = ["lattice1", "lattice2", "lattice3", "lattice4", "lattice5"];
pub const NONLINEAR: [&str; 5] = ["dA", "dB", "dB_hat", "dC", "dC_hat"];
pub const DEGENERATION: [&str; 5] = ["xi-xi_hat", "sigma-sigma_hat", "B-B_hat", "C-C_hat", "C^2B-B'A'"];

/// Residuals of the bilinear equations at site `n`, reading jets
/// `n−1..=n+1`. The second and third need `σ_{n−1}` and are `None` at
/// `n = 0`.
pub fn bilinear_from_jets(n: usize, jets: &[TauJet]) -> Result<[Option<Scalar>; 5]> {
    let get = |k: usize| jets.get(k).ok_or(Error::Range { what: "tau jets", index: k, available: jets.len() });
    let (j, j1) = (get(n)?, get(n + 1)?);
    let d_tau1 = hirota(&j1.tau, &j1.dtau, &j.tau, &j.dtau);
    let l1 = d_tau1.clone() - j.sigma.clone() * &j.sigma_hat;
    let (l2, l3) = match n.checked_sub(1) {
        None => (None, None),
        Some(m) => {
            let jm = get(m)?;
            (
                Some(hirota(&j.xi, &j.dxi, &j.tau, &j.dtau) - j.sigma_hat.clone() * &jm.sigma),
                Some(hirota(&j.xi_hat, &j.dxi_hat, &j.tau, &j.dtau) - j.sigma.clone() * &jm.sigma_hat),
            )
        }
    };
    let l4 = hirota(&j1.xi, &j1.dxi, &j.tau, &j.dtau) + hirota(&j1.tau, &j1.dtau, &j.xi_hat, &j.dxi_hat)
        - j.sigma.clone() * &j.dsigma_hat;
    let l5 = hirota(&j1.xi_hat, &j1.dxi_hat, &j.tau, &j.dtau) + hirota(&j1.tau, &j1.dtau, &j.xi, &j.dxi)
        - j.sigma_hat.clone() * &j.dsigma;
    Ok([Some(l1), l2, l3, Some(l4), Some(l5)])
}

pub fn bilinear_residuals(n: usize, table: &MomentTable) -> Result<[Option<Scalar>; 5]> {
    check_lattice_table(table)?;
    bilinear_from_jets(n, &tau_jets(n + 1, table)?)
}

/// Right-hand sides of the nonlinear system at the site of `cur`.
pub fn nonlinear_rhs(prev: &LatticeVars, cur: &LatticeVars, next: &LatticeVars) -> Result<[Scalar; 5]> {
    let need = |v: &LatticeVars| v.a.clone().ok_or(Error::Range { what: "A index", index: v.n, available: 1 });
    let (a, a1) = (need(cur)?, need(next)?);
    for (x, what, n) in
        [(&prev.c, "C", prev.n), (&prev.c_hat, "Ĉ", prev.n), (&cur.c, "C", cur.n), (&cur.c_hat, "Ĉ", cur.n)]
    {
        if x.is_zero() {
            return Err(Error::degenerate(what, n));
        }
    }
    let s_prev = prev.b.clone() + &prev.b_hat;
    let s = cur.b.clone() + &cur.b_hat;
    let da = a.clone() * (s.clone() - &s_prev);
    let db = s_prev.clone() * &prev.c_hat - s.clone() * &cur.c_hat;
    let db_hat = s_prev * &prev.c - s * &cur.c;
    let dc = cur.c.clone()
        * (cur.c.clone() - a.clone() / &prev.c - &cur.b_hat - &next.c + a1.clone() / &cur.c + &next.b_hat);
    let dc_hat =
        cur.c_hat.clone() * (cur.c_hat.clone() - a / &prev.c_hat - &cur.b - &next.c_hat + a1 / &cur.c_hat + &next.b);
    Ok([da, db, db_hat, dc, dc_hat])
}

/// Exact rates minus the nonlinear right-hand sides at site `n ≥ 1`.
pub fn nonlinear_from_jets(n: usize, jets: &[TauJet]) -> Result<[Scalar; 5]> {
    if n == 0 {
        return Err(Error::Range { what: "nonlinear site (needs n ≥ 1)", index: 0, available: 0 });
    }
    let (prev, _) = vars_from_jets(n - 1, jets)?;
    let (cur, rate) = vars_from_jets(n, jets)?;
    let (next, _) = vars_from_jets(n + 1, jets)?;
    let rhs = nonlinear_rhs(&prev, &cur, &next)?;
    let lhs = [rate.a.expect("n ≥ 1"), rate.b, rate.b_hat, rate.c, rate.c_hat];
    let mut out = lhs;
    for (o, r) in out.iter_mut().zip(rhs) {
        *o = o.clone() - r;
    }
    Ok(out)
}

pub fn nonlinear_residuals(n: usize, table: &MomentTable) -> Result<[Scalar; 5]> {
    check_lattice_table(table)?;
    nonlinear_from_jets(n, &tau_jets(n + 2, table)?)
}

/// Identities of the symmetric reduction at site `n`; all vanish when
/// `dμ₁ = dμ₂`.
pub fn degeneration_residuals(n: usize, table: &MomentTable) -> Result<[Scalar; 5]> {
    check_lattice_table(table)?;
    let jets = tau_jets(n + 2, table)?;
    let (v, _) = vars_from_jets(n, &jets)?;
    let (v1, _) = vars_from_jets(n + 1, &jets)?;
    let j = &jets[n];
    let toda = v.c.clone() * &v.c * &v.b - v1.b.clone() * v1.a.as_ref().expect("n+1 ≥ 1");
    Ok([j.xi.clone() - &j.xi_hat, j.sigma.clone() - &j.sigma_hat, v.b.clone() - &v.b_hat, v.c.clone() - &v.c_hat, toda])
}

/// In the symmetric case the fourth bilinear equation is half the
/// derivative of the first: `LHS₄ − ½(τ″_{n+1}τₙ − τ_{n+1}τ″ₙ)`.
pub fn symmetric_lattice4_residual(n: usize, table: &MomentTable) -> Result<Scalar> {
    check_lattice_table(table)?;
    if table.deriv_depth() < 2 {
        return Err(Error::Domain("second derivatives need derivative depth ≥ 2".into()));
    }
    let (j, j1) = (tau_jet(n, table)?, tau_jet(n + 1, table)?);
    let lhs4 = hirota(&j1.xi, &j1.dxi, &j.tau, &j.dtau) + hirota(&j1.tau, &j1.dtau, &j.xi_hat, &j.dxi_hat);
    let dd = layout::tau(n + 1).dt2(table)? * &j.tau - j1.tau.clone() * &layout::tau(n).dt2(table)?;
    Ok(lhs4 - dd / table.mode().int(2))
}

fn site_or_degenerate(n: usize, r: Result<SiteReport>) -> Result<SiteReport> {
    r.or_else(|e| SiteReport::from_error(n, e))
}

pub fn bilinear_report(n_top: usize, table: &MomentTable) -> Result<ResidualReport> {
    check_lattice_table(table)?;
    let jets = tau_jets(n_top + 1, table)?;
    let sites = (0..=n_top)
        .map(|n| {
            site_or_degenerate(
                n,
                bilinear_from_jets(n, &jets).map(|r| {
                    let mut site = SiteReport::checked(n, Vec::new());
                    for (name, v) in BILINEAR.iter().zip(r) {
                        match v {
                            Some(v) => site.residuals.push(ResidualEntry::new(*name, &v)),
                            None => site.skipped_equations.push(format!("{name}: needs σ_(n−1)")),
                        }
                    }
                    site
                }),
            )
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport::new("bilinear", table.mode(), sites))
}

pub fn nonlinear_report(n_top: usize, table: &MomentTable) -> Result<ResidualReport> {
    check_lattice_table(table)?;
    let jets = tau_jets(n_top + 2, table)?;
    let sites = (0..=n_top)
        .map(|n| {
            if n == 0 {
                return Ok(SiteReport::skipped(0, "A₀ and the n−1 neighbours do not exist"));
            }
            site_or_degenerate(n, nonlinear_from_jets(n, &jets).map(|r| entries(n, &NONLINEAR, &r)))
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport::new("nonlinear", table.mode(), sites))
}

pub fn derivative_report(n_top: usize, table: &MomentTable) -> Result<ResidualReport> {
    let sites = (0..=n_top)
        .map(|n| {
            site_or_degenerate(n, derivative_formula_residuals(n, table).map(|r| entries(n, &DERIVATIVE_FORMULAS, &r)))
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport::new("derivative_formulas", table.mode(), sites))
}

pub fn degeneration_report(n_top: usize, table: &MomentTable) -> Result<ResidualReport> {
    let sites = (0..=n_top)
        .map(|n| {
            site_or_degenerate(
                n,
                degeneration_residuals(n, table).and_then(|r| {
                    let mut s = entries(n, &DEGENERATION, &r);
                    if table.deriv_depth() >= 2 {
                        s.residuals.push(ResidualEntry::new(
                            "lattice4-half-d(lattice1)",
                            &symmetric_lattice4_residual(n, table)?,
                        ));
                    }
                    Ok(s)
                }),
            )
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport::new("degeneration", table.mode(), sites))
}

fn entries(n: usize, names: &[&str], values: &[Scalar]) -> SiteReport {
    SiteReport::checked(n, names.iter().zip(values).map(|(k, v)| ResidualEntry::new(*k, v)).collect())
}
