use super::coeffs::RecurrenceData;
use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::numerics::{DenseMatrix, Mode, Scalar};

/// `x·M·P = L·P` truncated to sites `0..N`: `M` carries `(aₙ, 1)` on its
/// diagonal and first superdiagonal, `L` the band `η_{n,n−k₂..n+k₁+1}`.
/// Both act on the vector `(P₀, …, P_{N+k₁})`.
#[derive(Clone, Debug)]
pub struct SpectralOperator {
    pub size: usize,
    pub k1: usize,
    pub k2: usize,
    pub l: DenseMatrix,
    pub m: DenseMatrix,
    mode: Mode,
}

impl SpectralOperator {
    pub fn from_data(data: &RecurrenceData<Scalar>, mode: Mode, size: usize) -> Result<Self> {
        if size == 0 || size > data.n_top() + 1 {
            return Err(Error::Range { what: "spectral operator size", index: size, available: data.n_top() + 1 });
        }
        let width = size + data.k1 + 1;
        let l = DenseMatrix::try_from_fn(size, width, |n, alpha| {
            if alpha + data.k2 < n || alpha > n + data.k1 + 1 {
                Ok(mode.zero())
            } else {
                data.eta(n, alpha)
            }
        })?;
        let m = DenseMatrix::try_from_fn(size, width, |n, alpha| {
            Ok(if alpha == n {
                data.a(n)?.clone()
            } else if alpha == n + 1 {
                mode.one()
            } else {
                mode.zero()
            })
        })?;
        Ok(SpectralOperator { size, k1: data.k1, k2: data.k2, l, m, mode })
    }

    /// `(lower, upper)` bandwidth of `L` as stored.
    pub fn l_bandwidths(&self) -> (usize, usize) {
        bandwidths(&self.l)
    }

    pub fn m_bandwidths(&self) -> (usize, usize) {
        bandwidths(&self.m)
    }

    /// Number of diagonals of `L` with a nonzero entry.
    pub fn l_nonzero_diagonals(&self) -> usize {
        let mut offsets: Vec<isize> = Vec::new();
        for i in 0..self.l.rows() {
            for j in 0..self.l.cols() {
                let d = j as isize - i as isize;
                if !self.l.get(i, j).is_zero() && !offsets.contains(&d) {
                    offsets.push(d);
                }
            }
        }
        offsets.len()
    }

    /// Coefficients of `x·(M·P)ₙ − (L·P)ₙ` over the θ-power basis.
    pub fn site_residual(&self, n: usize, data: &RecurrenceData<Scalar>) -> Result<Vec<Scalar>> {
        if n >= self.size {
            return Err(Error::Range { what: "spectral operator row", index: n, available: self.size });
        }
        let fam = data.family();
        let len = self.l.cols() + self.k1;
        let mode = self.mode;
        let mut acc = vec![mode.zero(); len];
        for col in 0..self.l.cols() {
            let p = fam.p(col)?;
            let (mc, lc) = (self.m.get(n, col), self.l.get(n, col));
            for (j, c) in p.iter().enumerate() {
                if !mc.is_zero() {
                    acc[j + self.k1] = acc[j + self.k1].clone() + mc.clone() * c;
                }
                if !lc.is_zero() {
                    acc[j] = acc[j].clone() - lc.clone() * c;
                }
            }
        }
        Ok(acc)
    }
}

fn bandwidths(m: &DenseMatrix) -> (usize, usize) {
    let (mut lo, mut hi) = (0, 0);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m.get(i, j).is_zero() {
                if i > j {
                    lo = lo.max(i - j);
                } else {
                    hi = hi.max(j - i);
                }
            }
        }
    }
    (lo, hi)
}

pub fn build_spectral_operator(size: usize, table: &MomentTable) -> Result<SpectralOperator> {
    let data = RecurrenceData::build(table, size - 1)?;
    SpectralOperator::from_data(&data, table.mode(), size)
}
