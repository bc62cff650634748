use super::poly::{BiorthPoly, PolyKind};
use crate::error::{Error, Result};
use crate::moments::{MomentSource, MomentTable, Side};
use crate::numerics::{Field, Scalar};

/// Coefficients of `P₀…P_N`, `Q₀…Q_N` and `h₀…h_N` over any scalar field
/// (plain values, or jets carrying exact time derivatives).
#[derive(Clone, Debug)]
pub struct CauchyFamily<F> {
    pub k1: usize,
    pub k2: usize,
    p: Vec<Vec<F>>,
    q: Vec<Vec<F>>,
    h: Vec<F>,
}

impl<F: Field> CauchyFamily<F> {
    pub fn build<S: MomentSource<Value = F>>(src: &S, n_max: usize) -> Result<Self> {
        let n = n_max + 1;
        let (rows, cols) = src.extent();
        if n > rows || n > cols {
            return Err(Error::Range { what: "moment table for the family", index: n_max, available: rows.min(cols) });
        }
        let mut a: Vec<Vec<F>> = (0..n).map(|i| (0..n).map(|j| src.bi(i, j)).collect()).collect::<Result<_>>()?;
        let mut l: Vec<Vec<F>> = vec![Vec::new(); n];
        let mut u: Vec<Vec<F>> = vec![Vec::new(); n];
        let mut h = Vec::with_capacity(n);
        for k in 0..n {
            let d = a[k][k].clone();
            if d.is_zero() {
                return Err(Error::degenerate("pivot τ_{n+1}/τ_n", k));
            }
            u[k] = (0..n).map(|j| if j > k { a[k][j].clone() / &d } else { d.zero_like() }).collect();
            let (upper, lower) = a.split_at_mut(k + 1);
            let pivot_row = &upper[k];
            for (off, row) in lower.iter_mut().enumerate() {
                let i = k + 1 + off;
                let lik = row[k].clone() / &d;
                for j in k + 1..n {
                    let t = lik.clone() * &pivot_row[j];
                    row[j] = row[j].clone() - t;
                }
                l[i].resize(k + 1, d.zero_like());
                l[i][k] = lik;
            }
            h.push(d);
        }
        let one = h[0].one_like();

        // Rows of L⁻¹.
        let mut p: Vec<Vec<F>> = Vec::with_capacity(n);
        for r in 0..n {
            let mut row = vec![one.zero_like(); r + 1];
            row[r] = one.clone();
            for j in (0..r).rev() {
                let mut s = one.zero_like();
                for k in j..r {
                    s = s + l[r][k].clone() * &p[k][j];
                }
                row[j] = -s;
            }
            p.push(row);
        }
        // Columns of U⁻¹.
        let mut q: Vec<Vec<F>> = Vec::with_capacity(n);
        for m in 0..n {
            let mut col = vec![one.zero_like(); m + 1];
            col[m] = one.clone();
            for j in (0..m).rev() {
                let mut s = one.zero_like();
                for k in j + 1..=m {
                    s = s + u[j][k].clone() * &col[k];
                }
                col[j] = -s;
            }
            q.push(col);
        }
        Ok(CauchyFamily { k1: src.k1(), k2: src.k2(), p, q, h })
    }

    pub fn n_max(&self) -> usize {
        self.h.len() - 1
    }

    pub fn p(&self, n: usize) -> Result<&[F]> {
        self.p.get(n).map(Vec::as_slice).ok_or(Error::Range { what: "P family", index: n, available: self.p.len() })
    }

    pub fn q(&self, n: usize) -> Result<&[F]> {
        self.q.get(n).map(Vec::as_slice).ok_or(Error::Range { what: "Q family", index: n, available: self.q.len() })
    }

    pub fn h(&self, n: usize) -> Result<&F> {
        self.h.get(n).ok_or(Error::Range { what: "normalisation h", index: n, available: self.h.len() })
    }
}

impl CauchyFamily<Scalar> {
    pub fn poly_p(&self, n: usize) -> Result<BiorthPoly> {
        Ok(BiorthPoly { kind: PolyKind::P, side: Side::X, n, k: self.k1 as u32, coeffs: self.p(n)?.to_vec() })
    }

    pub fn poly_q(&self, n: usize) -> Result<BiorthPoly> {
        Ok(BiorthPoly { kind: PolyKind::Q, side: Side::Y, n, k: self.k2 as u32, coeffs: self.q(n)?.to_vec() })
    }
}

pub fn cauchy_family(table: &MomentTable, n_max: usize) -> Result<CauchyFamily<Scalar>> {
    CauchyFamily::build(table, n_max)
}

#[allow(non_snake_case)]
pub fn cauchy_P(n: usize, table: &MomentTable) -> Result<BiorthPoly> {
    cauchy_family(table, n)?.poly_p(n)
}

#[allow(non_snake_case)]
pub fn cauchy_Q(n: usize, table: &MomentTable) -> Result<BiorthPoly> {
    cauchy_family(table, n)?.poly_q(n)
}

/// `Σ_{i,j} pᵢ qⱼ m_{ij}` for raw coefficient vectors.
pub fn pairing<F: Field, S: MomentSource<Value = F>>(p: &[F], q: &[F], src: &S) -> Result<F> {
    let mut acc: Option<F> = None;
    for (i, pi) in p.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            let term = pi.clone() * &src.bi(i, j)? * qj;
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
    }
    acc.ok_or_else(|| Error::Shape("empty coefficient vector".into()))
}

/// `⟨p, q⟩` for an `x`-side and a `y`-side polynomial.
pub fn inner_product(p: &BiorthPoly, q: &BiorthPoly, table: &MomentTable) -> Result<Scalar> {
    if p.side != Side::X || q.side != Side::Y {
        return Err(Error::Domain("inner_product pairs an x-side with a y-side polynomial".into()));
    }
    if p.k != table.params().k1 || q.k != table.params().k2 {
        return Err(Error::Domain("polynomial θ does not match the table".into()));
    }
    pairing(&p.coeffs, &q.coeffs, table)
}

/// `(⟨Pₙ,Q_m⟩ − hₙδ_{nm})/hₙ` for `n, m ≤ n_max`, one site per `n`.
pub fn orthogonality_report(n_max: usize, table: &MomentTable) -> Result<crate::report::ResidualReport> {
    use crate::report::{ResidualEntry, ResidualReport, SiteReport};
    let fam = cauchy_family(table, n_max)?;
    let mut sites = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let h = fam.h(n)?;
        let mut res = Vec::with_capacity(n_max + 1);
        for m in 0..=n_max {
            let ip = pairing(fam.p(n)?, fam.q(m)?, table)?;
            let gap = if n == m { ip - h } else { ip };
            res.push(ResidualEntry::new(format!("<P{n},Q{m}>"), &(gap / h)));
        }
        sites.push(SiteReport::checked(n, res));
    }
    Ok(ResidualReport::new("orth", table.mode(), sites))
}
