use serde::{Deserialize, Serialize};

use super::closed::{closed_bimoments, is_positive, quad_bimoments, single_moment};
use super::params::{ModelParams, Side, Weight};
use crate::error::{Error, Result};
use crate::numerics::{special::binomial, DenseMatrix, Dual, Field, Mode, Scalar};

/// Bi-moments `m_{ij} = ⟨x^{θ₁i}, y^{θ₂j}⟩` and single moments at one time,
/// indexed by exponent index from 0 (so `m_{ij} = I_{i+1,j+1}`).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    params: ModelParams,
    n_max: usize,
    deriv_depth: usize,
    bi: DenseMatrix,
    single_x: Vec<Scalar>,
    single_y: Vec<Scalar>,
}

/// Builds the table with index slots `0..=n_max + deriv_depth·k` on each
/// side and checks that every leading principal minor it can form is
/// positive.
pub fn build_table(params: &ModelParams, n_max: usize, deriv_depth: usize) -> Result<MomentTable> {
    params.validate()?;
    if deriv_depth > 0 && !params.has_time_flow() {
        return Err(Error::Domain("the Jacobi core has no time derivatives".into()));
    }
    let rows = n_max + 1 + deriv_depth * params.k1 as usize;
    let cols = n_max + 1 + deriv_depth * params.k2 as usize;
    let bi = match closed_bimoments(params, rows, cols)? {
        Some(m) => m,
        None => quad_bimoments(params, rows, cols)?,
    };
    let singles = |side: Side, len: usize| -> Result<Vec<Scalar>> {
        if !params.has_time_flow() {
            return Ok(Vec::new());
        }
        (0..len).map(|l| single_moment(side, l, params)).collect()
    };
    let single_x = singles(Side::X, rows)?;
    let single_y = singles(Side::Y, cols)?;
    let table = MomentTable { params: params.clone(), n_max, deriv_depth, bi, single_x, single_y };
    table.check_positive_minors()?;
    Ok(table)
}

impl MomentTable {
    /// Assembles a table from precomputed entries (used by import).
    pub fn from_parts(
        params: ModelParams,
        n_max: usize,
        deriv_depth: usize,
        bi: DenseMatrix,
        single_x: Vec<Scalar>,
        single_y: Vec<Scalar>,
    ) -> Result<Self> {
        params.validate()?;
        let rows = n_max + 1 + deriv_depth * params.k1 as usize;
        let cols = n_max + 1 + deriv_depth * params.k2 as usize;
        if bi.rows() != rows || bi.cols() != cols {
            return Err(Error::Shape(format!("expected a {rows}x{cols} moment grid, got {}x{}", bi.rows(), bi.cols())));
        }
        let singles_expected = if params.has_time_flow() { (rows, cols) } else { (0, 0) };
        if (single_x.len(), single_y.len()) != singles_expected {
            return Err(Error::Shape("single-moment lengths do not match the grid".into()));
        }
        let want = params.mode;
        for x in bi.entries().iter().chain(&single_x).chain(&single_y) {
            if x.mode() != want {
                return Err(Error::Mode(format!("entry in {} mode inside a {want} table", x.mode())));
            }
        }
        Ok(MomentTable { params, n_max, deriv_depth, bi, single_x, single_y })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.params.mode
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn deriv_depth(&self) -> usize {
        self.deriv_depth
    }

    pub fn rows(&self) -> usize {
        self.bi.rows()
    }

    pub fn cols(&self) -> usize {
        self.bi.cols()
    }

    pub fn grid(&self) -> &DenseMatrix {
        &self.bi
    }

    pub fn bi(&self, i: usize, j: usize) -> Result<&Scalar> {
        if i >= self.rows() {
            return Err(Error::Range { what: "moment row", index: i, available: self.rows() });
        }
        if j >= self.cols() {
            return Err(Error::Range { what: "moment column", index: j, available: self.cols() });
        }
        Ok(self.bi.get(i, j))
    }

    pub fn single(&self, side: Side, l: usize) -> Result<&Scalar> {
        let v = match side {
            Side::X => &self.single_x,
            Side::Y => &self.single_y,
        };
        if v.is_empty() {
            return Err(Error::Domain("this table carries no single moments".into()));
        }
        v.get(l).ok_or(Error::Range { what: "single moment", index: l, available: v.len() })
    }

    /// Leading `n×n` block of the bi-moment grid.
    pub fn block(&self, n: usize) -> Result<DenseMatrix> {
        if n > self.rows() || n > self.cols() {
            return Err(Error::Range { what: "moment block", index: n, available: self.rows().min(self.cols()) });
        }
        let idx: Vec<usize> = (0..n).collect();
        Ok(self.bi.select(&idx, &idx))
    }

    /// `τₙ = det(m_{ij})_{i,j<n}`, with `τ₀ = 1`.
    pub fn tau(&self, n: usize) -> Result<Scalar> {
        if n == 0 {
            return Ok(self.mode().one());
        }
        crate::numerics::det(&self.block(n)?)
    }

    /// The same table with one bi-moment replaced; for fault injection.
    pub fn with_bi_entry(&self, i: usize, j: usize, value: Scalar) -> Result<Self> {
        self.bi(i, j)?;
        self.bi.get(0, 0).check_same_mode(&value)?;
        let mut out = self.clone();
        out.bi.set(i, j, value);
        Ok(out)
    }

    /// Pivots of the unpivoted elimination are `τ_{k+1}/τ_k`; all must be
    /// positive for a pair of positive measures.
    fn check_positive_minors(&self) -> Result<()> {
        let n = self.rows().min(self.cols());
        let mut a: Vec<Vec<Scalar>> = (0..n).map(|i| self.bi.row(i)[..n].to_vec()).collect();
        for k in 0..n {
            if !is_positive(&a[k][k]) {
                return Err(Error::degenerate("moment determinant τ", k + 1));
            }
            let (upper, lower) = a.split_at_mut(k + 1);
            let pivot = &upper[k];
            for row in lower.iter_mut() {
                let f = row[k].clone() / &pivot[k];
                for j in k + 1..n {
                    let t = f.clone() * &pivot[j];
                    row[j] = row[j].clone() - t;
                }
            }
        }
        Ok(())
    }

    pub fn transposed(&self) -> MomentTable {
        MomentTable {
            params: self.params.transposed(),
            n_max: self.n_max,
            deriv_depth: self.deriv_depth,
            bi: self.bi.transpose(),
            single_x: self.single_y.clone(),
            single_y: self.single_x.clone(),
        }
    }
}

/// `∂ₜ^order m_{ij} = Σ_r C(order,r) m_{i+r·k₁, j+(order−r)·k₂}`.
pub fn moment_t_derivative(table: &MomentTable, i: usize, j: usize, order: usize) -> Result<Scalar> {
    if !table.params().has_time_flow() && order > 0 {
        return Err(Error::Domain("the Jacobi core has no time derivatives".into()));
    }
    let (k1, k2) = (table.params().k1 as usize, table.params().k2 as usize);
    let mut acc = table.mode().zero();
    for r in 0..=order {
        let c = table.mode().integer(&binomial(order as u32, r as u32));
        acc = acc + c * table.bi(i + r * k1, j + (order - r) * k2)?;
    }
    Ok(acc)
}

/// Read access to moments, abstracting over the plain table, its time jet
/// and its transpose.
pub trait MomentSource {
    type Value: Field;

    fn k1(&self) -> usize;
    fn k2(&self) -> usize;
    /// Number of usable row and column indices.
    fn extent(&self) -> (usize, usize);
    fn bi(&self, i: usize, j: usize) -> Result<Self::Value>;
    fn single_x(&self, l: usize) -> Result<Self::Value>;
    fn single_y(&self, l: usize) -> Result<Self::Value>;
}

impl MomentSource for MomentTable {
    type Value = Scalar;

    fn k1(&self) -> usize {
        self.params.k1 as usize
    }

    fn k2(&self) -> usize {
        self.params.k2 as usize
    }

    fn extent(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    fn bi(&self, i: usize, j: usize) -> Result<Scalar> {
        MomentTable::bi(self, i, j).cloned()
    }

    fn single_x(&self, l: usize) -> Result<Scalar> {
        self.single(Side::X, l).cloned()
    }

    fn single_y(&self, l: usize) -> Result<Scalar> {
        self.single(Side::Y, l).cloned()
    }
}

/// Moments as first-order jets in `t` via the shift rule:
/// `m_{ij} + ε(m_{i+k₁,j} + m_{i,j+k₂})`, `φ̂_l + εφ̂_{l+k₁}`.
#[derive(Clone, Copy, Debug)]
pub struct TimeJet<'a> {
    table: &'a MomentTable,
}

impl<'a> TimeJet<'a> {
    pub fn new(table: &'a MomentTable) -> Result<Self> {
        if !table.params().has_time_flow() {
            return Err(Error::Domain("the Jacobi core has no time derivatives".into()));
        }
        Ok(TimeJet { table })
    }
}

impl MomentSource for TimeJet<'_> {
    type Value = Dual<Scalar>;

    fn k1(&self) -> usize {
        self.table.k1()
    }

    fn k2(&self) -> usize {
        self.table.k2()
    }

    fn extent(&self) -> (usize, usize) {
        let (r, c) = self.table.extent();
        (r.saturating_sub(self.k1()), c.saturating_sub(self.k2()))
    }

    fn bi(&self, i: usize, j: usize) -> Result<Dual<Scalar>> {
        let v = self.table.bi(i, j)?.clone();
        let d = self.table.bi(i + self.k1(), j)?.clone() + self.table.bi(i, j + self.k2())?;
        Ok(Dual::new(v, d))
    }

    fn single_x(&self, l: usize) -> Result<Dual<Scalar>> {
        Ok(Dual::new(self.table.single_x(l)?, self.table.single_x(l + self.k1())?))
    }

    fn single_y(&self, l: usize) -> Result<Dual<Scalar>> {
        Ok(Dual::new(self.table.single_y(l)?, self.table.single_y(l + self.k2())?))
    }
}

/// The moment source with the two measures exchanged.
#[derive(Clone, Copy, Debug)]
pub struct Transposed<S>(pub S);

impl<S: MomentSource> MomentSource for Transposed<S> {
    type Value = S::Value;

    fn k1(&self) -> usize {
        self.0.k2()
    }

    fn k2(&self) -> usize {
        self.0.k1()
    }

    fn extent(&self) -> (usize, usize) {
        let (r, c) = self.0.extent();
        (c, r)
    }

    fn bi(&self, i: usize, j: usize) -> Result<S::Value> {
        self.0.bi(j, i)
    }

    fn single_x(&self, l: usize) -> Result<S::Value> {
        self.0.single_y(l)
    }

    fn single_y(&self, l: usize) -> Result<S::Value> {
        self.0.single_x(l)
    }
}

impl<S: MomentSource + ?Sized> MomentSource for &S {
    type Value = S::Value;

    fn k1(&self) -> usize {
        (**self).k1()
    }

    fn k2(&self) -> usize {
        (**self).k2()
    }

    fn extent(&self) -> (usize, usize) {
        (**self).extent()
    }

    fn bi(&self, i: usize, j: usize) -> Result<S::Value> {
        (**self).bi(i, j)
    }

    fn single_x(&self, l: usize) -> Result<S::Value> {
        (**self).single_x(l)
    }

    fn single_y(&self, l: usize) -> Result<S::Value> {
        (**self).single_y(l)
    }
}

pub const TABLE_SCHEMA: &str = "cbop.moment-table/1";

/// JSON form of a table. Exact entries are `p/q` strings, real entries
/// round-trippable decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDocument {
    pub schema: String,
    pub params: ModelParams,
    pub n_max: usize,
    pub deriv_depth: usize,
    pub encoding: String,
    pub bi_moments: Vec<Vec<String>>,
    pub single_x: Vec<String>,
    pub single_y: Vec<String>,
}

impl MomentTable {
    pub fn to_document(&self) -> TableDocument {
        let enc = |v: &[Scalar]| v.iter().map(Scalar::to_repr).collect::<Vec<_>>();
        TableDocument {
            schema: TABLE_SCHEMA.into(),
            params: self.params.clone(),
            n_max: self.n_max,
            deriv_depth: self.deriv_depth,
            encoding: if self.mode().is_exact() { "rational" } else { "decimal" }.into(),
            bi_moments: (0..self.rows()).map(|i| enc(self.bi.row(i))).collect(),
            single_x: enc(&self.single_x),
            single_y: enc(&self.single_y),
        }
    }

    pub fn from_document(doc: &TableDocument) -> Result<Self> {
        if doc.schema != TABLE_SCHEMA {
            return Err(Error::Format(format!("unsupported table schema {:?}", doc.schema)));
        }
        let mode = doc.params.mode;
        let dec = |v: &[String]| v.iter().map(|s| mode.parse(s)).collect::<Result<Vec<_>>>();
        let rows = doc.bi_moments.iter().map(|r| dec(r)).collect::<Result<Vec<_>>>()?;
        let bi = DenseMatrix::from_rows(rows)?;
        MomentTable::from_parts(
            doc.params.clone(),
            doc.n_max,
            doc.deriv_depth,
            bi,
            dec(&doc.single_x)?,
            dec(&doc.single_y)?,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("table serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: TableDocument = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// True when the weight is one of the families with closed-form moments.
pub fn has_closed_form(params: &ModelParams) -> bool {
    !matches!(params.weight, Weight::Custom { .. })
}
