use super::coeffs::RecurrenceData;
use crate::error::{Error, Result};
use crate::moments::{MomentSource, MomentTable, TimeJet, Transposed};
use crate::numerics::{Dual, Scalar};
use crate::report::{ResidualEntry, ResidualReport, SiteReport};

/// `eₙ = ∂ₜ(aₙhₙ)/hₙ` and `fₙ = eₙa_{n−1}/e_{n−1}` at one site.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionData {
    pub n: usize,
    pub e: Scalar,
    /// Absent at `n = 0`.
    pub f: Option<Scalar>,
}

/// Recurrence data carrying exact first `t`-derivatives.
pub type Jets = RecurrenceData<Dual<Scalar>>;

pub fn jets<S: MomentSource<Value = Dual<Scalar>>>(src: &S, n_top: usize) -> Result<Jets> {
    RecurrenceData::build(src, n_top)
}

/// `eₙ` for `n ≤ n_top + k₁`.
pub fn e_coeff(data: &Jets, n: usize) -> Result<Scalar> {
    let h = data.family().h(n)?;
    let ah = data.a(n)?.clone() * h;
    Ok(ah.deriv / &h.value)
}

pub fn evolution_data(data: &Jets, n: usize) -> Result<EvolutionData> {
    let e = e_coeff(data, n)?;
    let f = match n {
        0 => None,
        _ => {
            let prev = e_coeff(data, n - 1)?;
            if prev.is_zero() {
                return Err(Error::degenerate("e_{n-1} in fₙ", n));
            }
            Some(e.clone() * &data.a(n - 1)?.value / prev)
        }
    };
    Ok(EvolutionData { n, e, f })
}

/// Coefficients of `∂ₜ(P_{n+1}+aₙPₙ) − eₙPₙ`.
pub fn evolution_residual(data: &Jets, n: usize) -> Result<Vec<Scalar>> {
    let e = e_coeff(data, n)?;
    let mut r: Vec<Scalar> = data.combination(n)?.into_iter().map(|c| c.deriv).collect();
    for (l, c) in data.family().p(n)?.iter().enumerate() {
        r[l] = r[l].clone() - e.clone() * &c.value;
    }
    Ok(r)
}

/// `ξ_{n−k₂}, …, ξ_{n+k₁+1}` from `ξ_{n+k₁+1} = 1` and
/// `ξ_α + ξ_{α+1}a_α = η_{n,α} + fₙη_{n−1,α}`.
pub fn solve_xi_chain(data: &Jets, n: usize, f: &Scalar) -> Result<Vec<Scalar>> {
    let lo =
        n.checked_sub(data.k2).ok_or(Error::Range { what: "ξ chain start n−k₂", index: n, available: data.k2 })?;
    let top = n + data.k1 + 1;
    let one = f.int_like(1);
    let mut xi = vec![one; top - lo + 1];
    for alpha in (lo..top).rev() {
        let rhs = data.eta(n, alpha)?.value + f.clone() * &data.eta(n - 1, alpha)?.value;
        xi[alpha - lo] = rhs - xi[alpha + 1 - lo].clone() * &data.a(alpha)?.value;
    }
    Ok(xi)
}

/// Residuals of the compatibility system at site `n`.
#[derive(Clone, Debug)]
pub struct GctResidual {
    pub n: usize,
    pub evolution: EvolutionData,
    pub xi: Vec<Scalar>,
    /// `α = n−k₂ … n+k₁`.
    pub band: Vec<Scalar>,
    /// The `P_{n−k₂−1}` equation.
    pub lower: Scalar,
    /// `fₙη_{n−1,n−k₂−1} − ξ_{n−k₂}a_{n−k₂−1}`.
    pub closure: Scalar,
}

impl GctResidual {
    pub fn all(&self) -> impl Iterator<Item = &Scalar> {
        self.band.iter().chain([&self.lower, &self.closure])
    }

    pub fn entries(&self, k2: usize) -> Vec<ResidualEntry> {
        let lo = self.n - k2;
        let mut v: Vec<ResidualEntry> =
            self.band.iter().enumerate().map(|(i, r)| ResidualEntry::new(format!("band α={}", lo + i), r)).collect();
        v.push(ResidualEntry::new(format!("lower α={}", lo - 1), &self.lower));
        v.push(ResidualEntry::new("closure", &self.closure));
        v
    }
}

/// Smallest site with every index of the system non-negative.
pub fn first_interior_site(k2: usize) -> usize {
    k2 + 1
}

pub fn gct_site(data: &Jets, n: usize) -> Result<GctResidual> {
    if n < first_interior_site(data.k2) {
        return Err(Error::Range { what: "interior compatibility site", index: n, available: data.k2 + 1 });
    }
    let ev = evolution_data(data, n)?;
    let f = ev.f.clone().expect("n ≥ 1");
    let e_n = ev.e.clone();
    let xi = solve_xi_chain(data, n, &f)?;
    let lo = n - data.k2;
    let mut band = Vec::with_capacity(data.k1 + data.k2 + 1);
    for alpha in lo..=n + data.k1 {
        let (en, em) = (data.eta(n, alpha)?, data.eta(n - 1, alpha)?);
        let da = data.a(alpha)?.deriv.clone();
        let rhs = en.deriv + f.clone() * &em.deriv + xi[alpha + 1 - lo].clone() * (e_coeff(data, alpha)? - da);
        band.push(rhs - e_n.clone() * &em.value);
    }
    let below = lo - 1;
    let em = data.eta(n - 1, below)?;
    let a_below = data.a(below)?;
    let lower =
        f.clone() * &em.deriv + xi[0].clone() * (e_coeff(data, below)? - a_below.deriv.clone()) - e_n * &em.value;
    let closure = f * &em.value - xi[0].clone() * &a_below.value;
    Ok(GctResidual { n, evolution: ev, xi, band, lower, closure })
}

fn site_reports(data: &Jets, n_top: usize) -> Result<Vec<SiteReport>> {
    (0..=n_top)
        .map(|n| {
            if n < first_interior_site(data.k2) {
                return Ok(SiteReport::skipped(
                    n,
                    format!("index n−k₂−1 = {} is negative", n as i64 - data.k2 as i64 - 1),
                ));
            }
            match gct_site(data, n) {
                Ok(r) => Ok(SiteReport::checked(n, r.entries(data.k2))),
                Err(e) => SiteReport::from_error(n, e),
            }
        })
        .collect()
}

/// The compatibility residuals for sites `0..=n_top`; boundary sites are
/// listed as skipped. The table needs derivative depth 1 and
/// `n_max ≥ required_n_max(n_top, k₁, k₂)`.
pub fn gct_residual(n_top: usize, table: &MomentTable) -> Result<ResidualReport> {
    let data = jets(&TimeJet::new(table)?, n_top)?;
    Ok(ResidualReport::new("gct", table.mode(), site_reports(&data, n_top)?))
}

/// The dual system, read off the `Q` family.
pub fn dual_gct_residual(n_top: usize, table: &MomentTable) -> Result<ResidualReport> {
    let data = jets(&Transposed(TimeJet::new(table)?), n_top)?;
    Ok(ResidualReport::new("gct_dual", table.mode(), site_reports(&data, n_top)?))
}
