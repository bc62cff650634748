use crate::biorth::{BiorthPoly, CauchyFamily, PolyKind};
use crate::error::{Error, Result};
use crate::moments::{MomentSource, MomentTable, Side, Transposed};
use crate::numerics::{Field, Scalar};

/// Smallest table `n_max` carrying recurrence data through site `n_top`
/// on both sides (the dual needs the transposed extents).
pub fn required_n_max(n_top: usize, k1: u32, k2: u32) -> usize {
    n_top + k1.max(k2) as usize + 1
}

/// Recurrence coefficients `aₙ`, `η_{n,α}` for sites `0..=n_top`, together
/// with the family they were read off.
///
/// `x(P_{n+1} + aₙPₙ) = Σ_{α=n−k₂}^{n+k₁+1} η_{n,α} P_α`.
#[derive(Clone, Debug)]
pub struct RecurrenceData<F> {
    pub k1: usize,
    pub k2: usize,
    n_top: usize,
    family: CauchyFamily<F>,
    /// `∫Pₙ dμ₁`
    integrals: Vec<F>,
    a: Vec<F>,
    eta: Vec<Vec<F>>,
}

fn add_scaled<F: Field>(acc: &mut [F], v: &[F], s: &F, shift: usize) {
    for (l, c) in v.iter().enumerate() {
        let t = c.clone() * s;
        acc[l + shift] = acc[l + shift].clone() + t;
    }
}

impl<F: Field> RecurrenceData<F> {
    pub fn build<S: MomentSource<Value = F>>(src: &S, n_top: usize) -> Result<Self> {
        let (k1, k2) = (src.k1(), src.k2());
        let family = CauchyFamily::build(src, n_top + k1 + 1)?;
        let integrals = (0..=n_top + k1 + 1)
            .map(|n| {
                let p = family.p(n)?;
                let mut acc = p[0].clone() * &src.single_x(0)?;
                for (l, c) in p.iter().enumerate().skip(1) {
                    acc = acc + c.clone() * &src.single_x(l)?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<F>>>()?;
        let a = (0..=n_top + k1)
            .map(|n| {
                if integrals[n].is_zero() {
                    return Err(Error::degenerate("∫Pₙdμ₁ in aₙ", n));
                }
                Ok(-(integrals[n + 1].clone() / &integrals[n]))
            })
            .collect::<Result<Vec<F>>>()?;
        let mut data = RecurrenceData { k1, k2, n_top, family, integrals, a, eta: Vec::new() };
        for n in 0..=n_top {
            let row = (n.saturating_sub(k2)..=n + k1 + 1)
                .map(|alpha| data.eta_by_pairing(src, n, alpha))
                .collect::<Result<Vec<F>>>()?;
            data.eta.push(row);
        }
        Ok(data)
    }

    /// Coefficients of `P_{n+1} + aₙPₙ`.
    pub fn combination(&self, n: usize) -> Result<Vec<F>> {
        let a = self.a(n)?;
        let mut r = self.family.p(n + 1)?.to_vec();
        add_scaled(&mut r, self.family.p(n)?, a, 0);
        Ok(r)
    }

    /// `⟨x(P_{n+1}+aₙPₙ), Q_α⟩/h_α` evaluated for any `α` the table
    /// reaches, including those where it must vanish.
    pub fn eta_by_pairing<S: MomentSource<Value = F>>(&self, src: &S, n: usize, alpha: usize) -> Result<F> {
        let r = self.combination(n)?;
        let q = self.family.q(alpha)?;
        let mut acc = r[0].zero_like();
        for (l, rl) in r.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                acc = acc + rl.clone() * &src.bi(l + self.k1, j)? * qj;
            }
        }
        Ok(acc / self.family.h(alpha)?)
    }

    pub fn n_top(&self) -> usize {
        self.n_top
    }

    pub fn family(&self) -> &CauchyFamily<F> {
        &self.family
    }

    pub fn integral(&self, n: usize) -> Result<&F> {
        self.integrals.get(n).ok_or(Error::Range { what: "∫Pₙdμ₁", index: n, available: self.integrals.len() })
    }

    /// `aₙ` for `n ≤ n_top + k₁`.
    pub fn a(&self, n: usize) -> Result<&F> {
        self.a.get(n).ok_or(Error::Range { what: "recurrence coefficient a", index: n, available: self.a.len() })
    }

    /// Lowest `α` carried at site `n`.
    pub fn eta_lo(&self, n: usize) -> usize {
        n.saturating_sub(self.k2)
    }

    /// `η_{n,α}`; zero below the band.
    pub fn eta(&self, n: usize, alpha: usize) -> Result<F> {
        let row =
            self.eta.get(n).ok_or(Error::Range { what: "recurrence site", index: n, available: self.eta.len() })?;
        if alpha > n + self.k1 + 1 {
            return Err(Error::Range { what: "η index α", index: alpha, available: n + self.k1 + 2 });
        }
        match alpha.checked_sub(self.eta_lo(n)) {
            Some(i) => Ok(row[i].clone()),
            None => Ok(row[0].zero_like()),
        }
    }

    /// `x(P_{n+1}+aₙPₙ) − Σ η_{n,α}P_α`, coefficient vector of length `n+k₁+2`.
    pub fn residual_coeffs(&self, n: usize) -> Result<Vec<F>> {
        if n > self.n_top {
            return Err(Error::Range { what: "recurrence site", index: n, available: self.n_top + 1 });
        }
        let r = self.combination(n)?;
        let zero = r[0].zero_like();
        let mut acc = vec![zero; n + self.k1 + 2];
        add_scaled(&mut acc, &r, &r[0].one_like(), self.k1);
        for alpha in self.eta_lo(n)..=n + self.k1 + 1 {
            let e = -self.eta(n, alpha)?;
            add_scaled(&mut acc, self.family.p(alpha)?, &e, 0);
        }
        Ok(acc)
    }
}

fn residual_poly(data: &RecurrenceData<Scalar>, n: usize, side: Side) -> Result<BiorthPoly> {
    Ok(BiorthPoly { kind: PolyKind::Residual, side, n, k: data.k1 as u32, coeffs: data.residual_coeffs(n)? })
}

/// `aₙ = −∫P_{n+1}dμ₁ / ∫Pₙdμ₁`.
pub fn a_coeff(n: usize, table: &MomentTable) -> Result<Scalar> {
    RecurrenceData::build(table, n)?.a(n).cloned()
}

/// `âₙ`, from the `Q` family and `dμ₂`.
pub fn a_hat_coeff(n: usize, table: &MomentTable) -> Result<Scalar> {
    RecurrenceData::build(&Transposed(table), n)?.a(n).cloned()
}

pub fn eta_coeff(n: usize, alpha: usize, table: &MomentTable) -> Result<Scalar> {
    let k1 = table.params().k1 as usize;
    let k2 = table.params().k2 as usize;
    if alpha + k2 < n || alpha > n + k1 + 1 {
        return Err(Error::Range { what: "η index α", index: alpha, available: n + k1 + 2 });
    }
    RecurrenceData::build(table, n)?.eta(n, alpha)
}

pub fn eta_hat_coeff(n: usize, alpha: usize, table: &MomentTable) -> Result<Scalar> {
    eta_coeff(n, alpha, &table.transposed())
}

/// The polynomial that the recurrence at site `n` says is zero.
pub fn recurrence_residual(n: usize, table: &MomentTable) -> Result<BiorthPoly> {
    residual_poly(&RecurrenceData::build(table, n)?, n, Side::X)
}

/// The same for `y(Q_{n+1}+âₙQₙ) − Σ η̂_{n,α}Q_α`.
pub fn dual_recurrence_residual(n: usize, table: &MomentTable) -> Result<BiorthPoly> {
    residual_poly(&RecurrenceData::build(&Transposed(table), n)?, n, Side::Y)
}

/// Every coefficient of the primal and dual recurrence residuals at sites
/// `0..=n_top`. The table needs `n_max ≥ required_n_max(n_top, k₁, k₂)`.
pub fn recurrence_report(n_top: usize, table: &MomentTable) -> Result<crate::report::ResidualReport> {
    use crate::report::{ResidualEntry, ResidualReport, SiteReport};
    let primal = RecurrenceData::build(table, n_top)?;
    let dual = RecurrenceData::build(&Transposed(table), n_top)?;
    let mut sites = Vec::with_capacity(n_top + 1);
    for n in 0..=n_top {
        let mut res = Vec::new();
        for (tag, data, side) in [("P", &primal, Side::X), ("Q", &dual, Side::Y)] {
            let r = residual_poly(data, n, side)?;
            res.extend(r.coeffs.iter().enumerate().map(|(k, c)| ResidualEntry::new(format!("{tag}[{k}]"), c)));
        }
        sites.push(SiteReport::checked(n, res));
    }
    Ok(ResidualReport::new("recurrence", table.mode(), sites))
}
