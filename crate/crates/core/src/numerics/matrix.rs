use std::cmp::Ordering;

use rug::{Float, Integer, Rational};

use super::scalar::{Mode, Scalar};
use crate::error::{Error, Result};

/// Below this many trustworthy digits a real-mode determinant is rejected.
pub const MIN_CORRECT_DIGITS: f64 = 10.0;

/// Row-major rectangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T = Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> DenseMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(DenseMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn try_from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Result<T>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j)?);
            }
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.rows && j < self.cols, "matrix index ({i}, {j}) out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// Submatrix on the given row and column indices, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// The matrix with the listed rows and columns deleted.
    pub fn minor(&self, drop_rows: &[usize], drop_cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|r| !drop_rows.contains(r)).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|c| !drop_cols.contains(c)).collect();
        self.select(&rows, &cols)
    }

    pub fn with_row(&self, i: usize, row: &[T]) -> Self {
        assert_eq!(row.len(), self.cols);
        let mut out = self.clone();
        out.data[i * self.cols..(i + 1) * self.cols].clone_from_slice(row);
        out
    }

    pub fn transpose(&self) -> Self {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl DenseMatrix<Scalar> {
    /// The common arithmetic mode of the entries (`None` when empty).
    pub fn mode(&self) -> Result<Option<Mode>> {
        let mut it = self.data.iter();
        let Some(first) = it.next() else { return Ok(None) };
        for x in it {
            first.check_same_mode(x)?;
        }
        Ok(Some(first.mode()))
    }
}

/// A determinant together with the error bookkeeping of the elimination.
#[derive(Clone, Debug)]
pub struct Determinant {
    pub value: Scalar,
    /// Estimated decimal digits lost; zero in exact mode.
    pub digits_lost: f64,
    /// Largest intermediate entry over the largest input entry, after
    /// equilibration. One in exact mode.
    pub growth: f64,
}

/// Determinant of a square matrix.
///
/// Exact mode clears denominators row by row and runs fraction-free
/// (Bareiss) elimination on integers. Real mode equilibrates rows and
/// columns by powers of two, eliminates with partial pivoting and rejects
/// the result when fewer than [`MIN_CORRECT_DIGITS`] digits survive.
pub fn det(m: &DenseMatrix) -> Result<Scalar> {
    det_with_report(m).map(|d| d.value)
}

pub fn det_with_report(m: &DenseMatrix) -> Result<Determinant> {
    if !m.is_square() {
        return Err(Error::Shape(format!("determinant of a {}x{} matrix", m.rows(), m.cols())));
    }
    match m.mode()? {
        None => Err(Error::Shape("determinant of an empty matrix has no arithmetic mode".into())),
        Some(Mode::Exact) => Ok(Determinant { value: Scalar::Exact(det_exact(m)), digits_lost: 0.0, growth: 1.0 }),
        Some(Mode::Real { digits }) => det_real(m, digits),
    }
}

/// Determinant of the minor obtained by deleting the listed rows and
/// columns; an empty minor has determinant one in the matrix's mode.
pub fn minor_det(m: &DenseMatrix, drop_rows: &[usize], drop_cols: &[usize]) -> Result<Scalar> {
    let sub = m.minor(drop_rows, drop_cols);
    if sub.rows() == 0 && sub.cols() == 0 {
        let mode = m.mode()?.ok_or_else(|| Error::Shape("empty matrix".into()))?;
        return Ok(mode.one());
    }
    det(&sub)
}

fn det_exact(m: &DenseMatrix) -> Rational {
    let n = m.rows();
    let mut scale = Integer::from(1);
    let mut a: Vec<Vec<Integer>> = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<&Rational> = m.row(i).iter().map(|x| x.as_rational().expect("exact entries")).collect();
        let mut l = Integer::from(1);
        for q in &row {
            l.lcm_mut(q.denom());
        }
        a.push(row.iter().map(|q| q.numer() * Integer::from(&l / q.denom())).collect());
        scale *= l;
    }

    let mut negate = false;
    let mut prev = Integer::from(1);
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Rational::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = Integer::from(&a[i][j] * &a[k][k]) - Integer::from(&a[i][k] * &a[k][j]);
                a[i][j] = v.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = if n == 0 { Integer::from(1) } else { a[n - 1][n - 1].clone() };
    let d = Rational::from((d, scale));
    if negate {
        -d
    } else {
        d
    }
}

fn det_real(m: &DenseMatrix, digits: u32) -> Result<Determinant> {
    let n = m.rows();
    let prec = m.entries().iter().filter_map(Scalar::as_float).map(Float::prec).max().unwrap_or(64);
    let mut a: Vec<Vec<Float>> = (0..n)
        .map(|i| m.row(i).iter().map(|x| Float::with_val(prec, x.as_float().expect("real entries"))).collect())
        .collect();
    let zero = |digits_lost| Determinant { value: Scalar::Real(Float::new(prec)), digits_lost, growth: 1.0 };

    // Power-of-two equilibration is exact, so it changes conditioning but
    // not the value beyond the tracked exponent.
    let mut log2_scale: i64 = 0;
    for row in a.iter_mut() {
        let Some(e) = row.iter().filter_map(Float::get_exp).max() else {
            return Ok(zero(0.0));
        };
        for x in row.iter_mut() {
            *x >>= e;
        }
        log2_scale += e as i64;
    }
    for j in 0..n {
        let Some(e) = (0..n).filter_map(|i| a[i][j].get_exp()).max() else {
            return Ok(zero(0.0));
        };
        for row in a.iter_mut() {
            row[j] >>= e;
        }
        log2_scale += e as i64;
    }

    let abs_max = |a: &Vec<Vec<Float>>, from: usize| -> f64 {
        let mut best = 0f64;
        for row in a.iter().skip(from) {
            for x in row.iter().skip(from) {
                best = best.max(x.to_f64().abs());
            }
        }
        best
    };
    let initial_max = abs_max(&a, 0);
    let mut growth: f64 = 1.0;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut negate = false;
    for k in 0..n {
        let mut p = k;
        for r in k + 1..n {
            if a[r][k].cmp_abs(&a[p][k]) == Some(Ordering::Greater) {
                p = r;
            }
        }
        if a[p][k].is_zero() {
            return Ok(zero(f64::INFINITY));
        }
        if p != k {
            a.swap(p, k);
            perm.swap(p, k);
            negate = !negate;
        }
        let (upper, lower) = a.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        for row in lower.iter_mut() {
            let factor = Float::with_val(prec, &row[k] / &pivot_row[k]);
            for j in k + 1..n {
                let prod = Float::with_val(prec, &factor * &pivot_row[j]);
                row[j] -= prod;
            }
            row[k] = factor;
        }
        if k + 1 < n {
            growth = growth.max(abs_max(&a, k + 1) / initial_max);
        }
    }

    let mut value = Float::with_val(prec, 1);
    for (k, row) in a.iter().enumerate() {
        value *= &row[k];
    }
    if negate {
        value = -value;
    }
    // Scaling by 2^e for e beyond i32 range does not occur for matrices of
    // the sizes handled here.
    let shift = i32::try_from(log2_scale).map_err(|_| Error::Domain("determinant exponent overflow".into()))?;
    value <<= shift;

    let kappa = condition_estimate(&a, n);
    let digits_lost = ((n as f64) * growth * kappa).max(1.0).log10();
    let correct = digits as f64 - digits_lost;
    if correct < MIN_CORRECT_DIGITS {
        return Err(Error::Precision { digits, correct_digits: correct });
    }
    Ok(Determinant { value: Scalar::Real(value), digits_lost, growth })
}

/// 1-norm condition number of the equilibrated matrix from its packed LU
/// factors, evaluated with a 64-bit mantissa and MPFR's exponent range.
fn condition_estimate(lu: &[Vec<Float>], n: usize) -> f64 {
    const P: u32 = 64;
    let f = |x: &Float| Float::with_val(P, x);
    let l = |i: usize, j: usize| {
        if i == j {
            Float::with_val(P, 1)
        } else if j < i {
            f(&lu[i][j])
        } else {
            Float::new(P)
        }
    };
    let u = |i: usize, j: usize| if j >= i { f(&lu[i][j]) } else { Float::new(P) };

    // ‖A‖₁ of the permuted matrix L·U equals that of A.
    let mut norm_a = Float::new(P);
    for j in 0..n {
        let mut col = Float::new(P);
        for i in 0..n {
            let mut s = Float::new(P);
            for k in 0..=i.min(j) {
                s += l(i, k) * u(k, j);
            }
            col += s.abs();
        }
        if col > norm_a {
            norm_a = col;
        }
    }

    // Columns of (LU)⁻¹: rows are permuted, which leaves the 1-norm alone.
    let mut norm_inv = Float::new(P);
    for c in 0..n {
        let mut y: Vec<Float> = (0..n).map(|i| Float::with_val(P, (i == c) as u32)).collect();
        for i in 0..n {
            for k in 0..i {
                let t = l(i, k) * &y[k];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = u(i, k) * &y[k];
                y[i] -= t;
            }
            y[i] /= u(i, i);
        }
        let col: Float = y.iter().fold(Float::new(P), |acc, v| acc + Float::with_val(P, v.abs_ref()));
        if col > norm_inv {
            norm_inv = col;
        }
    }
    let kappa = Float::with_val(P, &norm_a * &norm_inv);
    let (mant, exp) = kappa.to_f64_exp();
    if mant == 0.0 {
        1.0
    } else {
        mant * 2f64.powi(exp.min(1000))
    }
}

/// `d/dt det M` as the sum over rows of `det(M with row r taken from dM)`.
pub fn det_t_derivative(m: &DenseMatrix, dm: &DenseMatrix) -> Result<Scalar> {
    if m.rows() != dm.rows() || m.cols() != dm.cols() {
        return Err(Error::Shape(format!(
            "derivative matrix is {}x{}, matrix is {}x{}",
            dm.rows(),
            dm.cols(),
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Shape(format!("determinant of a {}x{} matrix", m.rows(), m.cols())));
    }
    let mut acc: Option<Scalar> = None;
    for r in 0..m.rows() {
        let d = det(&m.with_row(r, dm.row(r)))?;
        acc = Some(match acc {
            None => d,
            Some(s) => s + d,
        });
    }
    Ok(acc.expect("non-empty"))
}

/// Residual `D·D(i₁,i₂;j₁,j₂) − [D(i₁;j₁)D(i₂;j₂) − D(i₁;j₂)D(i₂;j₁)]` of
/// the Desnanot–Jacobi identity, where `D(I;J)` is the minor with rows `I`
/// and columns `J` deleted. Indices are zero-based.
pub fn jacobi_identity_residual(m: &DenseMatrix, i1: usize, i2: usize, j1: usize, j2: usize) -> Result<Scalar> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    if !(i1 < i2 && j1 < j2) {
        return Err(Error::Domain(format!("need i1 < i2 and j1 < j2, got ({i1}, {i2}; {j1}, {j2})")));
    }
    for idx in [i2, j2] {
        if idx >= n {
            return Err(Error::Range { what: "Jacobi identity index", index: idx, available: n });
        }
    }
    let d = det(m)?;
    let lhs = d * minor_det(m, &[i1, i2], &[j1, j2])?;
    let rhs = minor_det(m, &[i1], &[j1])? * minor_det(m, &[i2], &[j2])?
        - minor_det(m, &[i1], &[j2])? * minor_det(m, &[i2], &[j1])?;
    Ok(lhs - rhs)
}

/// Runs `f` at increasing precision: starts at `max(50, requested)` digits
/// and doubles after each precision error, at most four times.
pub fn with_escalation<T>(requested: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<(T, u32)> {
    let mut digits = requested.max(50);
    let mut escalations = 0;
    loop {
        match f(digits) {
            Err(Error::Precision { .. }) if escalations < 4 => {
                digits *= 2;
                escalations += 1;
            }
            other => return other.map(|v| (v, digits)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exact(rows: &[&[(i64, i64)]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&(p, q)| Mode::Exact.ratio(p, q)).collect()).collect())
            .unwrap()
    }

    fn cofactor(m: &DenseMatrix) -> Scalar {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = Mode::Exact.zero();
        for j in 0..n {
            let term = m.get(0, j).clone() * cofactor(&m.minor(&[0], &[j]));
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    fn laguerre_entry(i: i64, j: i64, t: &Scalar) -> Scalar {
        let mode = t.mode();
        let fact = |k: i64| (1..=k).fold(mode.one(), |a, v| a * mode.int(v));
        let s = mode.one() - t.clone();
        fact(i) * fact(j) / mode.int(i + j + 1) * s.powi(-(1 + i + j))
    }

    #[test]
    fn small_examples() {
        assert_eq!(det(&exact(&[&[(7, 3)]])).unwrap(), Mode::Exact.ratio(7, 3));
        assert_eq!(det(&exact(&[&[(1, 1), (1, 2)], &[(1, 2), (1, 3)]])).unwrap(), Mode::Exact.ratio(1, 12));
        let id = DenseMatrix::from_fn(3, 3, |i, j| Mode::Exact.int((i == j) as i64));
        assert_eq!(det(&id).unwrap(), Mode::Exact.one());
    }

    #[test]
    fn zero_pivot_needs_swap() {
        let m = exact(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(det(&m).unwrap(), Mode::Exact.int(-1));
        let singular = exact(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert!(det(&singular).unwrap().is_zero());
    }

    #[test]
    fn shape_and_mode_errors() {
        let rect = DenseMatrix::from_fn(2, 3, |_, _| Mode::Exact.one());
        assert!(matches!(det(&rect), Err(Error::Shape(_))));
        let mixed = DenseMatrix::from_rows(vec![
            vec![Mode::Exact.one(), Mode::real(30).one()],
            vec![Mode::Exact.one(), Mode::Exact.one()],
        ])
        .unwrap();
        assert!(matches!(det(&mixed), Err(Error::Mode(_))));
        assert!(DenseMatrix::from_rows(vec![vec![1], vec![1, 2]]).is_err());
    }

    #[test]
    fn real_det_matches_exact() {
        let q = DenseMatrix::from_fn(5, 5, |i, j| Mode::Exact.ratio(1, (i + j + 1) as i64));
        let exact = det(&q).unwrap();
        let r = q.map(|x| Mode::real(40).converted(x).unwrap());
        let rep = det_with_report(&r).unwrap();
        let rel = ((rep.value.clone() - Mode::real(40).converted(&exact).unwrap()) / rep.value.clone()).abs();
        assert!(rel.log10_abs() < -40.0 + rep.digits_lost + 1.0);
        assert!(rep.digits_lost > 4.0 && rep.digits_lost < 10.0, "lost {}", rep.digits_lost);
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        let hilbert = DenseMatrix::from_fn(14, 14, |i, j| Mode::real(20).ratio(1, (i + j + 1) as i64));
        assert!(matches!(det(&hilbert), Err(Error::Precision { .. })));
        let (d, digits) = with_escalation(20, |digits| {
            det(&DenseMatrix::from_fn(14, 14, |i, j| Mode::real(digits).ratio(1, (i + j + 1) as i64)))
        })
        .unwrap();
        assert_eq!(digits, 50);
        assert!(d.signum() > 0);
    }

    #[test]
    fn derivative_examples() {
        let m = Mode::Exact;
        let c = exact(&[&[(1, 1), (2, 1)], &[(3, 1), (5, 1)]]);
        let zero = DenseMatrix::from_fn(2, 2, |_, _| m.zero());
        assert!(det_t_derivative(&c, &zero).unwrap().is_zero());
        let one = exact(&[&[(5, 2)]]);
        let done = exact(&[&[(-1, 3)]]);
        assert_eq!(det_t_derivative(&one, &done).unwrap(), m.ratio(-1, 3));

        // det of [[1/(1-t), 1/(2(1-t)^2)], [1/(2(1-t)^2), 1/(3(1-t)^3)]] = (1/12)(1-t)^-4, derivative 1/3 at 0
        let t = m.zero();
        let mat = DenseMatrix::from_fn(2, 2, |i, j| laguerre_entry(i as i64, j as i64, &t));
        let dmat = DenseMatrix::from_fn(2, 2, |i, j| {
            let (i, j) = (i as i64, j as i64);
            laguerre_entry(i + 1, j, &t) + laguerre_entry(i, j + 1, &t)
        });
        assert_eq!(det_t_derivative(&mat, &dmat).unwrap(), m.ratio(1, 3));
        assert!(matches!(det_t_derivative(&mat, &one), Err(Error::Shape(_))));
    }

    #[test]
    fn derivative_against_richardson_difference() {
        let mode = Mode::real(40);
        let n = 3;
        let t0 = mode.ratio(1, 5);
        let at = |t: &Scalar| det(&DenseMatrix::from_fn(n, n, |i, j| laguerre_entry(i as i64, j as i64, t))).unwrap();
        let central = |h: &Scalar| (at(&(t0.clone() + h)) - at(&(t0.clone() - h))) / (h.clone() * mode.int(2));
        let m = DenseMatrix::from_fn(n, n, |i, j| laguerre_entry(i as i64, j as i64, &t0));
        let dm = DenseMatrix::from_fn(n, n, |i, j| {
            let (i, j) = (i as i64, j as i64);
            laguerre_entry(i + 1, j, &t0) + laguerre_entry(i, j + 1, &t0)
        });
        let exact = det_t_derivative(&m, &dm).unwrap();
        let rich = |h: &Scalar| {
            let half = h.clone() / mode.int(2);
            (central(&half) * mode.int(4) - central(h)) / mode.int(3)
        };
        let e1 = (rich(&mode.ratio(1, 100)) - exact.clone()).abs().to_f64();
        let e2 = (rich(&mode.ratio(1, 200)) - exact.clone()).abs().to_f64();
        assert!(e1 / exact.to_f64() < 1e-6);
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "error ratio {ratio}");
    }

    #[test]
    fn jacobi_on_2x2_is_the_determinant() {
        let m = exact(&[&[(2, 1), (3, 1)], &[(5, 1), (7, 1)]]);
        assert!(jacobi_identity_residual(&m, 0, 1, 0, 1).unwrap().is_zero());
        assert!(jacobi_identity_residual(&m, 1, 0, 0, 1).is_err());
        assert!(matches!(jacobi_identity_residual(&m, 0, 2, 0, 1), Err(Error::Range { .. })));
    }

    fn rational_matrix(n: usize) -> impl Strategy<Value = DenseMatrix> {
        prop::collection::vec((-20i64..20, 1i64..8), n * n).prop_map(move |v| {
            DenseMatrix::from_fn(n, n, |i, j| {
                let (p, q) = v[i * n + j];
                Mode::Exact.ratio(p, q)
            })
        })
    }

    proptest! {
        #[test]
        fn exact_det_equals_cofactor_expansion(m in (1usize..=4).prop_flat_map(rational_matrix)) {
            prop_assert_eq!(det(&m).unwrap(), cofactor(&m));
        }

        #[test]
        fn jacobi_identity_holds_exactly(
            (m, idx) in (2usize..=5).prop_flat_map(|n| (rational_matrix(n), prop::collection::vec(0..n, 4)))
        ) {
            let n = m.rows();
            let (mut i1, mut i2, mut j1, mut j2) = (idx[0], idx[1], idx[2], idx[3]);
            if i1 == i2 { i2 = (i1 + 1) % n; }
            if j1 == j2 { j2 = (j1 + 1) % n; }
            if i1 > i2 { std::mem::swap(&mut i1, &mut i2); }
            if j1 > j2 { std::mem::swap(&mut j1, &mut j2); }
            prop_assert!(jacobi_identity_residual(&m, i1, i2, j1, j2).unwrap().is_zero());
        }

        #[test]
        fn real_det_agrees_across_precisions(m in (2usize..=5).prop_flat_map(rational_matrix)) {
            let exact = det(&m).unwrap();
            prop_assume!(!exact.is_zero());
            let lo = det_with_report(&m.map(|x| Mode::real(30).converted(x).unwrap()));
            let hi = det_with_report(&m.map(|x| Mode::real(60).converted(x).unwrap())).unwrap();
            if let Ok(lo) = lo {
                let hi30 = Mode::real(30).converted(&hi.value).unwrap();
                let gap = ((lo.value - hi30.clone()) / hi30).abs();
                prop_assert!(gap.log10_abs() <= -(30.0 - lo.digits_lost) + 1.0,
                    "gap 10^{} lost {}", gap.log10_abs(), lo.digits_lost);
            }
        }
    }
}
