use crate::error::{Error, Result};
use crate::moments::{MomentTable, Side};
use crate::numerics::special::binomial;
use crate::numerics::{det, DenseMatrix, Scalar};

/// A row of a bordered moment matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSpec {
    Moment(usize),
    /// `φ_j = ∫yʲdμ₂` across the moment columns.
    Phi,
    /// Zero except a one under the `φ̂` column.
    Unit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColSpec {
    Moment(usize),
    /// `φ̂_i = ∫xⁱdμ₁` down the moment rows.
    PhiHat,
    /// Zero except a one beside the `φ` row.
    Unit,
}

/// A determinant whose entries are moments, single moments and constants,
/// differentiable in `t` through the shift rule. The empty matrix has
/// determinant one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bordered {
    pub rows: Vec<RowSpec>,
    pub cols: Vec<ColSpec>,
}

/// `0, …, n−1` as moment indices.
pub fn moments<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// `0, …, n−2, n`: the last index pushed up by one.
pub fn shifted<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n.saturating_sub(1)).chain(std::iter::once(n)).map(f).collect()
}

impl Bordered {
    pub fn new(rows: Vec<RowSpec>, cols: Vec<ColSpec>) -> Self {
        Bordered { rows, cols }
    }

    /// The `order`-th `t`-derivative of one entry.
    fn entry(table: &MomentTable, order: usize, r: RowSpec, c: ColSpec) -> Result<Scalar> {
        let mode = table.mode();
        let constant = |v: i64| if order == 0 { mode.int(v) } else { mode.zero() };
        Ok(match (r, c) {
            (RowSpec::Moment(i), ColSpec::Moment(j)) => {
                let mut acc = mode.zero();
                for k in 0..=order {
                    let w = mode.integer(&binomial(order as u32, k as u32));
                    acc = acc + w * table.bi(i + k, j + order - k)?;
                }
                acc
            }
            (RowSpec::Moment(i), ColSpec::PhiHat) => table.single(Side::X, i + order)?.clone(),
            (RowSpec::Phi, ColSpec::Moment(j)) => table.single(Side::Y, j + order)?.clone(),
            (RowSpec::Phi, ColSpec::Unit) | (RowSpec::Unit, ColSpec::PhiHat) => constant(1),
            _ => constant(0),
        })
    }

    fn matrix_of_order(&self, table: &MomentTable, order: usize) -> Result<DenseMatrix> {
        if self.rows.len() != self.cols.len() {
            return Err(Error::Shape(format!("bordered matrix is {}x{}", self.rows.len(), self.cols.len())));
        }
        DenseMatrix::try_from_fn(self.rows.len(), self.cols.len(), |i, j| {
            Self::entry(table, order, self.rows[i], self.cols[j])
        })
    }

    pub fn matrix(&self, table: &MomentTable) -> Result<DenseMatrix> {
        self.matrix_of_order(table, 0)
    }

    pub fn value(&self, table: &MomentTable) -> Result<Scalar> {
        if self.rows.is_empty() && self.cols.is_empty() {
            return Ok(table.mode().one());
        }
        det(&self.matrix(table)?)
    }

    /// `∂ₜ det`. Exact mode sums row replacements; real mode eliminates on
    /// the truncated series `M + εM′` so that singular replacement matrices
    /// never reach the determinant's conditioning guard.
    pub fn dt(&self, table: &MomentTable) -> Result<Scalar> {
        if self.rows.is_empty() {
            return Ok(table.mode().zero());
        }
        let m = self.matrix(table)?;
        let d1 = self.matrix_of_order(table, 1)?;
        if !table.mode().is_exact() {
            det(&m)?;
            if let Some(c) = series_det(&[&m, &d1]) {
                return Ok(c[1].clone());
            }
        }
        let mut acc = table.mode().zero();
        for r in 0..m.rows() {
            acc = acc + det(&m.with_row(r, d1.row(r)))?;
        }
        Ok(acc)
    }

    /// `∂ₜ² det`: each row twice, or two distinct rows once each.
    pub fn dt2(&self, table: &MomentTable) -> Result<Scalar> {
        if self.rows.is_empty() {
            return Ok(table.mode().zero());
        }
        let m = self.matrix(table)?;
        let d1 = self.matrix_of_order(table, 1)?;
        let d2 = self.matrix_of_order(table, 2)?;
        if !table.mode().is_exact() {
            det(&m)?;
            let half = d2.map(|x| x.clone() / x.int_like(2));
            if let Some(c) = series_det(&[&m, &d1, &half]) {
                return Ok(c[2].clone() * c[2].int_like(2));
            }
        }
        let mut acc = table.mode().zero();
        for r in 0..m.rows() {
            acc = acc + det(&m.with_row(r, d2.row(r)))?;
            for s in 0..m.rows() {
                if s != r {
                    acc = acc + det(&m.with_row(r, d1.row(r)).with_row(s, d1.row(s)))?;
                }
            }
        }
        Ok(acc)
    }
}

type Series = Vec<Scalar>;

fn s_mul(a: &Series, b: &Series) -> Series {
    (0..a.len()).map(|n| (1..=n).fold(a[0].clone() * &b[n], |acc, i| acc + a[i].clone() * &b[n - i])).collect()
}

fn s_div(a: &Series, b: &Series) -> Series {
    let mut c: Series = Vec::with_capacity(a.len());
    for n in 0..a.len() {
        let s = (1..=n).fold(a[n].clone(), |acc, i| acc - b[i].clone() * &c[n - i]);
        c.push(s / &b[0]);
    }
    c
}

/// Coefficients of `det(Σ εᵏ Mₖ)` up to the number of matrices given, by
/// partial pivoting on the constant term; `None` when that term is singular.
fn series_det(terms: &[&DenseMatrix]) -> Option<Series> {
    let n = terms[0].rows();
    let mut a: Vec<Vec<Series>> =
        (0..n).map(|i| (0..n).map(|j| terms.iter().map(|m| m.get(i, j).clone()).collect()).collect()).collect();
    let mut acc: Series = {
        let one = a[0][0][0].int_like(1);
        let mut v = vec![one.int_like(0); terms.len()];
        v[0] = one;
        v
    };
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x][k][0].log10_abs().total_cmp(&a[y][k][0].log10_abs()))?;
        if a[p][k][0].is_zero() {
            return None;
        }
        if p != k {
            a.swap(p, k);
            acc = acc.into_iter().map(|x| -x).collect();
        }
        let (upper, lower) = a.split_at_mut(k + 1);
        let pivot = &upper[k];
        for row in lower.iter_mut() {
            let f = s_div(&row[k], &pivot[k]);
            for j in k + 1..n {
                let prod = s_mul(&f, &pivot[j]);
                for (x, y) in row[j].iter_mut().zip(prod) {
                    *x = x.clone() - y;
                }
            }
        }
        acc = s_mul(&acc, &pivot[k]);
    }
    Some(acc)
}
